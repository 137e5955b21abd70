#include "netsync/harness/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace netsync::harness {

namespace {

using nlohmann::json;

const char* const kPolicyOrder[] = {"jccs", "cost_bg", "confidence_bg", "rc"};

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << body;
  if (!out) {
    throw std::runtime_error("short write to " + path.string());
  }
}

json report_to_json(const metrics::TimingReport& r) {
  return json{{"mean_one_way_us", r.mean_one_way_us},
              {"max_one_way_us", r.max_one_way_us},
              {"jitter_stddev_us", r.jitter_stddev_us},
              {"jitter_p99_spread_us", r.jitter_p99_spread_us},
              {"avg_aoi_us", r.avg_aoi_us},
              {"peak_aoi_us", r.peak_aoi_us},
              {"out_of_order_fraction", r.out_of_order_fraction},
              {"loss_fraction", r.loss_fraction},
              {"delivery_ratio", r.delivery_ratio},
              {"mean_correction", r.mean_correction},
              {"max_correction", r.max_correction},
              {"packets_sent", r.packets_sent},
              {"packets_delivered", r.packets_delivered}};
}

json verdicts_to_json(const metrics::Verdicts& v) {
  json reqs = json::array();
  for (const metrics::Requirement& r : v.requirements) {
    reqs.push_back(json{{"name", r.name},
                        {"measured", r.measured},
                        {"threshold", r.threshold},
                        {"pass", r.pass}});
  }
  return json{{"preset", metrics::preset_name(v.preset)},
              {"overall", v.overall},
              {"requirements", reqs}};
}

std::string dt_rows_csv(
    const std::vector<std::pair<std::string, const dtsched::EpisodeResult*>>&
        results) {
  std::string out = "slot,policy,energy_j,mrmse_contrib,queries,delivered\n";
  char buf[192];
  for (const auto& [name, res] : results) {
    for (const dtsched::SlotRow& row : res->rows) {
      std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g,%.17g,%u,%u\n",
                    static_cast<unsigned long long>(row.slot), name.c_str(),
                    row.energy_j, row.mrmse_contrib, row.queries,
                    row.delivered);
      out += buf;
    }
  }
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  return {metrics::mean(xs), metrics::sample_stddev(xs)};
}

json mean_std_json(const std::vector<double>& xs) {
  const MeanStd ms = mean_std(xs);
  return json{{"mean", ms.mean}, {"stddev", ms.stddev}};
}

// Aggregates the per-seed timing.json documents into summary.json.
json aggregate(const std::string& name, const std::vector<json>& seed_docs) {
  json out;
  out["scenario"] = name;
  json seeds = json::array();
  for (const json& doc : seed_docs) {
    seeds.push_back(doc.at("seed"));
  }
  out["seeds"] = seeds;

  // Netcode: mean +/- sample stddev per client over seeds.
  if (!seed_docs.empty() && seed_docs.front().contains("clients") &&
      !seed_docs.front().at("clients").empty()) {
    static const char* const kFields[] = {
        "mean_one_way_us", "max_one_way_us",     "jitter_stddev_us",
        "avg_aoi_us",      "peak_aoi_us",        "loss_fraction",
        "delivery_ratio",  "out_of_order_fraction", "mean_correction",
        "max_correction"};
    json clients;
    for (const auto& [cid, unused] : seed_docs.front().at("clients").items()) {
      json entry;
      for (const char* field : kFields) {
        std::vector<double> xs;
        for (const json& doc : seed_docs) {
          xs.push_back(
              doc.at("clients").at(cid).at("report").at(field).get<double>());
        }
        entry[field] = mean_std_json(xs);
      }
      int pass_count = 0;
      for (const json& doc : seed_docs) {
        if (doc.at("clients").at(cid).at("verdicts").at("overall").get<bool>()) {
          ++pass_count;
        }
      }
      entry["verdict_pass_count"] = pass_count;
      entry["verdict_seed_count"] = seed_docs.size();
      clients[cid] = entry;
    }
    out["netcode"] = json{{"clients", clients}};
  }

  // dt-sched: per-policy aggregates and the headline ratios.
  if (!seed_docs.empty() && seed_docs.front().contains("dtsched")) {
    json policies;
    std::map<std::string, MeanStd> power, mrmse;
    for (const char* pol : kPolicyOrder) {
      std::vector<double> pw, ms;
      for (const json& doc : seed_docs) {
        pw.push_back(doc.at("dtsched").at(pol).at("avg_power_w").get<double>());
        ms.push_back(doc.at("dtsched").at(pol).at("mrmse").get<double>());
      }
      policies[pol] =
          json{{"avg_power_w", mean_std_json(pw)}, {"mrmse", mean_std_json(ms)}};
      power[pol] = mean_std(pw);
      mrmse[pol] = mean_std(ms);
    }
    json ratios;
    if (power.at("cost_bg").mean > 0.0) {
      ratios["power_jccs_over_cost_bg"] =
          power.at("jccs").mean / power.at("cost_bg").mean;
    }
    if (mrmse.at("jccs").mean > 0.0) {
      ratios["mrmse_cost_bg_over_jccs"] =
          mrmse.at("cost_bg").mean / mrmse.at("jccs").mean;
    }
    out["dtsched"] = json{{"policies", policies}, {"ratios", ratios}};
  }
  return out;
}

}  // namespace

std::filesystem::path resolve_out_root(
    const std::optional<std::string>& cli_out) {
  if (cli_out.has_value() && !cli_out->empty()) {
    return *cli_out;
  }
  if (const char* env = std::getenv("NETSYNC_OUT");
      env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

metrics::TimingReport build_report(const std::vector<metrics::EventRow>& rows,
                                   std::uint32_t client_id,
                                   sim::TimeUs window_end_us) {
  metrics::TimingReport rep;
  metrics::AoiProcess aoi;
  std::vector<double> delays;
  std::vector<double> corrections;
  std::uint64_t sent = 0, delivered = 0, lost = 0, ooo = 0;
  sim::TimeUs newest_gen = -1;

  for (const metrics::EventRow& r : rows) {
    if (r.client_id != client_id) {
      continue;
    }
    if (r.kind == "snap_send") {
      ++sent;
    } else if (r.kind == "snap_lost") {
      ++lost;
    } else if (r.kind == "snap_recv") {
      ++delivered;
      delays.push_back(static_cast<double>(r.time_us) - r.value);
      aoi.add_delivery(r.gen_time_us, r.time_us);
      if (r.gen_time_us < newest_gen) {
        ++ooo;
      }
      newest_gen = std::max(newest_gen, r.gen_time_us);
    } else if (r.kind == "reconcile") {
      corrections.push_back(r.value);
    }
  }

  rep.packets_sent = sent;
  rep.packets_delivered = delivered;
  // Fractions are over packets whose fate is decided by window end;
  // the odd snapshot still in flight is neither lost nor delivered.
  const std::uint64_t decided = delivered + lost;
  rep.loss_fraction =
      decided > 0 ? static_cast<double>(lost) / static_cast<double>(decided)
                  : 0.0;
  rep.delivery_ratio = decided > 0 ? static_cast<double>(delivered) /
                                         static_cast<double>(decided)
                                   : 1.0;
  rep.out_of_order_fraction =
      delivered > 0 ? static_cast<double>(ooo) / static_cast<double>(delivered)
                    : 0.0;
  if (!delays.empty()) {
    rep.mean_one_way_us = metrics::mean(delays);
    rep.max_one_way_us = *std::max_element(delays.begin(), delays.end());
    rep.jitter_stddev_us = metrics::sample_stddev(delays);
    rep.jitter_p99_spread_us =
        metrics::percentile(delays, 99.0) -
        *std::min_element(delays.begin(), delays.end());
  }
  if (const auto first = aoi.first_delivery_us();
      first.has_value() && *first < window_end_us) {
    const auto stats = aoi.stats(*first, window_end_us);
    rep.avg_aoi_us = stats.average_us;
    rep.peak_aoi_us = static_cast<double>(stats.peak_us);
  }
  if (!corrections.empty()) {
    rep.mean_correction = metrics::mean(corrections);
    rep.max_correction =
        *std::max_element(corrections.begin(), corrections.end());
  }
  return rep;
}

namespace {

SeedOutcome run_seed(const Scenario& sc, std::uint64_t seed,
                     const std::filesystem::path& seed_dir) {
  SeedOutcome out;
  out.seed = seed;
  json timing;
  timing["scenario"] = sc.name;
  timing["seed"] = seed;
  timing["preset"] = metrics::preset_name(sc.preset);

  std::string events_csv = "time_us,kind,client_id,id,gen_time_us,value,value2\n";
  std::string dt_csv = "slot,policy,energy_j,mrmse_contrib,queries,delivered\n";

  if (sc.netcode.has_value()) {
    NetcodeSim nsim(*sc.netcode, seed);
    nsim.run(sc.duration_us);
    events_csv = nsim.collector().to_csv();

    json clients;
    for (const ClientSpec& cs : sc.netcode->clients) {
      const std::uint32_t cid = cs.cfg.client_id;
      metrics::TimingReport rep =
          build_report(nsim.collector().rows(), cid, sc.duration_us);
      metrics::Verdicts verd = metrics::classify(rep, sc.preset);

      json entry;
      entry["report"] = report_to_json(rep);
      entry["verdicts"] = verdicts_to_json(verd);
      json offset;
      offset["true_offset_us"] = cs.cfg.clock_offset_us;
      const auto est = nsim.server().offset_estimate_us(cid);
      if (est.has_value()) {
        offset["estimate_us"] = *est;
        offset["error_us"] =
            *est - static_cast<double>(cs.cfg.clock_offset_us);
      }
      const auto pd = nsim.server().path_delay_estimate_us(cid);
      if (pd.has_value()) {
        offset["path_delay_us"] = *pd;
      }
      entry["offset"] = offset;
      clients[std::to_string(cid)] = entry;

      out.reports.emplace(cid, rep);
      out.verdicts.emplace(cid, verd);
    }
    timing["clients"] = clients;
  }

  if (sc.dt.has_value()) {
    json dt_json;
    std::vector<std::pair<std::string, const dtsched::EpisodeResult*>> rows;
    std::map<std::string, dtsched::EpisodeResult> results;
    for (const char* pol : kPolicyOrder) {
      results.emplace(pol, dtsched::run_episode(
                               *sc.dt, dtsched::policy_from_name(pol), seed));
    }
    for (const char* pol : kPolicyOrder) {
      const dtsched::EpisodeResult& res = results.at(pol);
      dt_json[pol] = json{{"avg_power_w", res.avg_power_w},
                          {"mrmse", res.mrmse},
                          {"total_energy_j", res.total_energy_j},
                          {"total_queries", res.total_queries},
                          {"delivered_queries", res.delivered_queries},
                          {"consistency_ratio", res.consistency_ratio}};
      rows.emplace_back(pol, &res);
    }
    dt_csv = dt_rows_csv(rows);
    timing["dtsched"] = dt_json;
    for (auto& [pol, res] : results) {
      res.rows.clear();
      out.dt.emplace(pol, std::move(res));
    }
  }

  write_file(seed_dir / "events.csv", events_csv);
  write_file(seed_dir / "timing.json", timing.dump(2) + "\n");
  write_file(seed_dir / "dtsched.csv", dt_csv);
  out.timing = std::move(timing);
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opts) {
  std::vector<std::uint64_t> seeds = sc.seeds;
  if (opts.seed_override.has_value()) {
    seeds = {*opts.seed_override};
  }

  RunResult result;
  result.scenario_dir = resolve_out_root(opts.out_root) / sc.name;

  std::vector<json> seed_docs;
  for (const std::uint64_t seed : seeds) {
    const std::filesystem::path seed_dir =
        result.scenario_dir / std::to_string(seed);
    SeedOutcome outcome = run_seed(sc, seed, seed_dir);
    seed_docs.push_back(outcome.timing);
    for (const auto& [cid, verd] : outcome.verdicts) {
      result.checks_passed = result.checks_passed && verd.overall;
    }
    result.seeds.push_back(std::move(outcome));
  }

  result.summary = aggregate(sc.name, seed_docs);
  write_file(result.scenario_dir / "summary.json",
             result.summary.dump(2) + "\n");
  return result;
}

CalibrationResult calibrate_lambda(const Scenario& sc, double target_power_w) {
  if (!sc.dt.has_value()) {
    throw ScenarioError("calibrate: scenario has no dtsched block");
  }
  if (target_power_w < 0.0) {
    throw ScenarioError("calibrate: target power must be >= 0");
  }

  // Calibration evaluates JCCS power on a bounded seed subset; the
  // bisection is over a function of lambda only.
  std::vector<std::uint64_t> seeds = sc.seeds;
  if (seeds.size() > 5) {
    seeds.resize(5);
  }
  int evals = 0;
  std::vector<std::pair<double, double>> sweep;  // (lambda, power)
  const auto power_at = [&](double lambda) {
    dtsched::DtScenario dt = *sc.dt;
    dt.lambda = lambda;
    std::vector<double> powers;
    for (const std::uint64_t seed : seeds) {
      powers.push_back(
          dtsched::run_episode(dt, dtsched::PolicyKind::kJccs, seed, false)
              .avg_power_w);
    }
    const double p = metrics::mean(powers);
    ++evals;
    // Monotone non-increasing in lambda (small tolerance for the
    // finite-sample wobble of a greedy, gated policy).
    for (const auto& [l_prev, p_prev] : sweep) {
      const double tol = 0.01 * (sweep.empty() ? p : sweep.front().second) +
                         1e-12;
      if ((lambda > l_prev && p > p_prev + tol) ||
          (lambda < l_prev && p < p_prev - tol)) {
        throw std::logic_error(
            "calibrate: power is not monotone non-increasing in lambda");
      }
    }
    sweep.emplace_back(lambda, p);
    return p;
  };

  constexpr double kLambdaMax = 1000.0;
  const double p_zero = power_at(0.0);
  const double p_max = power_at(kLambdaMax);
  if (target_power_w > p_zero || target_power_w < p_max) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "NOT_BRACKETED: target %.4f W outside reachable power range "
                  "[%.4f, %.4f] W",
                  target_power_w, p_max, p_zero);
    throw NotBracketedError(buf);
  }

  double lo = 0.0, hi = kLambdaMax;
  double best_lambda = 0.0, best_power = p_zero;
  for (int iter = 0; iter < 48; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double p = power_at(mid);
    if (std::abs(p - target_power_w) < std::abs(best_power - target_power_w)) {
      best_lambda = mid;
      best_power = p;
    }
    if (std::abs(p - target_power_w) <= 0.03 * target_power_w) {
      return {mid, p, evals};
    }
    if (p > target_power_w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {best_lambda, best_power, evals};
}

nlohmann::json report_dir(const std::filesystem::path& scenario_dir) {
  std::vector<std::pair<std::uint64_t, json>> docs;
  if (!std::filesystem::is_directory(scenario_dir)) {
    throw std::runtime_error("not a directory: " + scenario_dir.string());
  }
  for (const auto& entry :
       std::filesystem::directory_iterator(scenario_dir)) {
    if (!entry.is_directory()) {
      continue;
    }
    const std::filesystem::path timing_path = entry.path() / "timing.json";
    if (!std::filesystem::exists(timing_path)) {
      continue;
    }
    std::ifstream in(timing_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("bad timing.json under " +
                               entry.path().string() + ": " + e.what());
    }
    docs.emplace_back(doc.at("seed").get<std::uint64_t>(), std::move(doc));
  }
  if (docs.empty()) {
    throw std::runtime_error("no per-seed timing.json found under " +
                             scenario_dir.string());
  }
  std::sort(docs.begin(), docs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<json> seed_docs;
  std::string name = docs.front().second.at("scenario").get<std::string>();
  for (auto& [seed, doc] : docs) {
    seed_docs.push_back(std::move(doc));
  }
  json summary = aggregate(name, seed_docs);
  write_file(scenario_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace netsync::harness
