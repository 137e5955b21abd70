#include "netsync/dtsched/episode.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace netsync::dtsched {

void validate(const DtScenario& sc) {
  if (sc.num_objects == 0) {
    throw std::invalid_argument("num_objects must be > 0");
  }
  if (sc.tau_s <= 0.0) {
    throw std::invalid_argument("tau must be > 0");
  }
  if (sc.q <= 0.0) {
    throw std::invalid_argument("q must be > 0");
  }
  if (sc.q_max != 0.0 && sc.q_max < sc.q) {
    throw std::invalid_argument("q_max must be >= q (or 0 for homogeneous)");
  }
  if (sc.horizon_slots == 0) {
    throw std::invalid_argument("horizon must be > 0");
  }
  if (sc.r_position <= 0.0 || sc.r_velocity <= 0.0) {
    throw std::invalid_argument("sensor variances must be > 0");
  }
  if (sc.energy_min_j <= 0.0 || sc.energy_max_j < sc.energy_min_j) {
    throw std::invalid_argument("query energy range invalid");
  }
  if (sc.variance_gate <= 0.0) {
    throw std::invalid_argument("variance_gate must be > 0");
  }
  if (sc.lambda < 0.0) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (sc.initial_pos_var < 0.0 || sc.initial_vel_var < 0.0) {
    throw std::invalid_argument("initial variances must be >= 0");
  }
  if (sc.query_loss_prob < 0.0 || sc.query_loss_prob > 1.0) {
    throw std::invalid_argument("query_loss_prob must be in [0,1]");
  }
}

std::vector<SensorMeta> build_sensors(const DtScenario& sc,
                                      std::uint64_t seed) {
  sim::RngStream energy_rng(seed, "dt.energy");
  std::vector<SensorMeta> sensors;
  sensors.reserve(2 * sc.num_objects);
  // Position sensors first (ids 0..M-1), then velocity (M..2M-1).
  for (std::size_t i = 0; i < sc.num_objects; ++i) {
    SensorMeta s;
    s.sensor_id = static_cast<std::uint32_t>(i);
    s.kind = SensorKind::kPosition;
    s.object = static_cast<std::uint32_t>(i);
    s.r = sc.r_position;
    s.energy_j = energy_rng.uniform(sc.energy_min_j, sc.energy_max_j);
    sensors.push_back(s);
  }
  for (std::size_t i = 0; i < sc.num_objects; ++i) {
    SensorMeta s;
    s.sensor_id = static_cast<std::uint32_t>(sc.num_objects + i);
    s.kind = SensorKind::kVelocity;
    s.object = static_cast<std::uint32_t>(i);
    s.r = sc.r_velocity;
    s.energy_j = energy_rng.uniform(sc.energy_min_j, sc.energy_max_j);
    sensors.push_back(s);
  }
  for (const SensorMeta& s : sensors) {
    validate(s, sc.num_objects);
  }
  return sensors;
}

namespace {

struct Chol2 {
  double l11, l21, l22;
};

Chol2 cholesky(const Mat2& m) {
  const double l11 = std::sqrt(m.a11);
  const double l21 = m.a12 / l11;
  const double l22 = std::sqrt(std::max(0.0, m.a22 - l21 * l21));
  return {l11, l21, l22};
}

void check_psd(const Mat2& m, const char* where) {
  if (min_eigenvalue(m) < -1e-9) {
    throw std::logic_error(std::string("covariance lost PSD in ") + where);
  }
}

}  // namespace

EpisodeResult run_episode(const DtScenario& sc, PolicyKind policy,
                          std::uint64_t seed, bool keep_rows) {
  validate(sc);
  const std::string pname = policy_name(policy);
  const std::vector<SensorMeta> sensors = build_sensors(sc, seed);

  sim::RngStream truth_rng(seed, "dt.truth");
  sim::RngStream meas_rng(seed, "dt.meas." + pname);
  sim::RngStream rc_rng(seed, "dt.rc." + pname);

  // Queries cross an impaired link; only its loss matters here (the
  // measurement is consumed within the slot it was taken in).
  sim::LinkModel link_model;
  link_model.loss_prob = sc.query_loss_prob;
  link_model.reorder_allowed = true;
  sim::Link query_link(link_model, sim::RngStream(seed, "dt.link." + pname));

  const std::size_t m = sc.num_objects;
  // Per-object dynamics; the q draws live on their own stream so the
  // sensor energies stay identical with or without heterogeneity.
  std::vector<ProcessModel> models(m, ProcessModel{sc.tau_s, sc.q});
  if (sc.q_max > sc.q) {
    sim::RngStream process_rng(seed, "dt.process");
    const double lo = std::log(sc.q), hi = std::log(sc.q_max);
    for (std::size_t i = 0; i < m; ++i) {
      models[i].q = std::exp(process_rng.uniform(lo, hi));
    }
  }
  std::vector<Chol2> lqs;
  lqs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    lqs.push_back(cholesky(models[i].Q()));
  }

  // Truth drawn from the DT's prior: mean 0, diag initial covariance.
  std::vector<std::array<double, 2>> truth(m);
  std::vector<Belief> beliefs(m);
  for (std::size_t i = 0; i < m; ++i) {
    beliefs[i].mean = {0.0, 0.0};
    beliefs[i].cov = Mat2::diag(sc.initial_pos_var, sc.initial_vel_var);
    truth[i] = {truth_rng.normal(0.0, std::sqrt(sc.initial_pos_var)),
                truth_rng.normal(0.0, std::sqrt(sc.initial_vel_var))};
  }

  SchedulePolicy sp;
  sp.kind = policy;
  sp.lambda = sc.lambda;
  sp.variance_gate = sc.variance_gate;
  sp.max_queries = sc.max_queries;
  sp.confidence_uses_posterior = sc.confidence_uses_posterior;

  EpisodeResult out;
  if (keep_rows) {
    out.rows.reserve(sc.horizon_slots);
  }
  long double mrmse_acc = 0.0L;
  long double sq_err_acc = 0.0L;
  long double post_var_acc = 0.0L;

  for (std::uint64_t slot = 1; slot <= sc.horizon_slots; ++slot) {
    // Ground truth steps first; its random draws are policy-independent.
    for (std::size_t i = 0; i < m; ++i) {
      const double z1 = truth_rng.normal(0.0, 1.0);
      const double z2 = truth_rng.normal(0.0, 1.0);
      const double wx = lqs[i].l11 * z1;
      const double wv = lqs[i].l21 * z1 + lqs[i].l22 * z2;
      truth[i] = {truth[i][0] + sc.tau_s * truth[i][1] + wx, truth[i][1] + wv};
    }

    for (std::size_t i = 0; i < m; ++i) {
      kalman_predict(beliefs[i], models[i]);
      check_psd(beliefs[i].cov, "predict");
    }

    const std::vector<std::size_t> chosen =
        select_sensors(beliefs, sensors, sp, &rc_rng);

    const sim::TimeUs slot_time_us =
        static_cast<sim::TimeUs>(std::llround(static_cast<double>(slot) *
                                              sc.tau_s * 1e6));
    double slot_energy = 0.0;
    std::uint32_t delivered = 0;
    for (std::size_t idx : chosen) {
      const SensorMeta& s = sensors[idx];
      slot_energy += s.energy_j;  // the query transmits either way
      if (!query_link.send(slot_time_us, 0).has_value()) {
        continue;  // lost in the channel: energy spent, no update
      }
      const double z = truth[s.object][s.component()] +
                       meas_rng.normal(0.0, std::sqrt(s.r));
      kalman_update(beliefs[s.object], s.component(), z, s.r);
      check_psd(beliefs[s.object].cov, "update");
      ++delivered;
    }

    long double sq = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      const double ep = beliefs[i].mean[0] - truth[i][0];
      const double ev = beliefs[i].mean[1] - truth[i][1];
      sq += static_cast<long double>(ep) * ep +
            static_cast<long double>(ev) * ev;
      post_var_acc += beliefs[i].cov.a11 + beliefs[i].cov.a22;
    }
    sq_err_acc += sq;
    const double contrib =
        std::sqrt(static_cast<double>(sq / static_cast<long double>(2 * m)));
    mrmse_acc += contrib;

    out.total_energy_j += slot_energy;
    out.total_queries += chosen.size();
    out.delivered_queries += delivered;
    if (keep_rows) {
      out.rows.push_back({slot, slot_energy, contrib,
                          static_cast<std::uint32_t>(chosen.size()),
                          delivered});
    }
  }

  const double horizon_s =
      static_cast<double>(sc.horizon_slots) * sc.tau_s;
  out.avg_power_w = out.total_energy_j / horizon_s;
  out.mrmse = static_cast<double>(
      mrmse_acc / static_cast<long double>(sc.horizon_slots));
  out.consistency_ratio =
      post_var_acc > 0.0L ? static_cast<double>(sq_err_acc / post_var_acc)
                          : 0.0;
  return out;
}

}  // namespace netsync::dtsched
