// netsync: scenario runner for the netcode + sensor-scheduling lab.
//
// Exit codes: 0 success, 1 --check verdict failure, 2 configuration error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "netsync/harness/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

void print_verdicts(const netsync::harness::SeedOutcome& seed) {
  for (const auto& [cid, verd] : seed.verdicts) {
    for (const auto& req : verd.requirements) {
      std::printf("seed %llu client %u  %-18s measured %12.3f  threshold "
                  "%12.3f  %s\n",
                  static_cast<unsigned long long>(seed.seed), cid,
                  req.name.c_str(), req.measured, req.threshold,
                  req.pass ? "ok" : "FAIL");
    }
  }
}

int cmd_run(const std::string& path, const netsync::harness::RunOptions& opts,
            bool verbose) {
  const netsync::harness::Scenario sc = netsync::harness::load_scenario(path);
  const netsync::harness::RunResult res =
      netsync::harness::run_scenario(sc, opts);
  std::printf("wrote %s (%zu seed%s)\n", res.scenario_dir.string().c_str(),
              res.seeds.size(), res.seeds.size() == 1 ? "" : "s");
  if (verbose || (opts.check && !res.checks_passed)) {
    for (const auto& seed : res.seeds) {
      print_verdicts(seed);
    }
  }
  if (opts.check && !res.checks_passed) {
    std::printf("check: FAILED (preset %s)\n",
                netsync::metrics::preset_name(sc.preset).c_str());
    return kExitCheckFailed;
  }
  if (opts.check) {
    std::printf("check: passed (preset %s)\n",
                netsync::metrics::preset_name(sc.preset).c_str());
  }
  return kExitOk;
}

int cmd_calibrate(const std::string& path, double target_power_w) {
  const netsync::harness::Scenario sc = netsync::harness::load_scenario(path);
  const netsync::harness::CalibrationResult cal =
      netsync::harness::calibrate_lambda(sc, target_power_w);
  std::printf("lambda = %.6f\n", cal.lambda);
  std::printf("achieved_power_w = %.6f (target %.6f)\n", cal.achieved_power_w,
              target_power_w);
  std::printf("evaluations = %d\n", cal.evaluations);
  return kExitOk;
}

int cmd_report(const std::string& dir) {
  const nlohmann::json summary = netsync::harness::report_dir(dir);
  std::printf("%s\n", summary.dump(2).c_str());
  return kExitOk;
}

int cmd_presets_list() {
  std::printf("%-6s %s\n", "name", "requirements");
  std::printf("%-6s %s\n", "none", "(no requirements; classification only)");
  std::printf("%-6s %s\n", "fps", "rtt_us <= 100000");
  std::printf("%-6s %s\n", "vr", "rtt_us <= 20000, transmission_us <= 7000");
  std::printf("%-6s %s\n", "iiot",
              "max_one_way_us <= 1000, delivery_ratio >= 0.999999");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic netcode + sensor-scheduling lab"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string report_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_root;
  bool check = false;
  bool verbose = false;
  double target_power_w = 0.0;

  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  run->add_option("--seed-override", seed_override,
                  "run only this seed instead of the scenario's list");
  run->add_option("--out", out_root, "output root (default $NETSYNC_OUT or ./out)");
  run->add_flag("--check", check,
                "exit 1 unless every client meets the scenario preset");
  run->add_flag("-v,--verbose", verbose, "print per-seed verdict lines");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "fit lambda to a power target");
  calibrate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  calibrate
      ->add_option("--target-power", target_power_w, "average power target, W")
      ->required();

  CLI::App* report =
      app.add_subcommand("report", "rebuild summary.json for a scenario dir");
  report->add_option("dir", report_path, "out/<scenario> directory")
      ->required();

  CLI::App* presets = app.add_subcommand("presets", "preset utilities");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "list presets and their thresholds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path,
                     netsync::harness::RunOptions{seed_override, out_root,
                                                  check},
                     verbose);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(scenario_path, target_power_w);
    }
    if (report->parsed()) {
      return cmd_report(report_path);
    }
    if (presets->parsed()) {
      return cmd_presets_list();
    }
  } catch (const netsync::harness::NotBracketedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  } catch (const netsync::harness::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}
