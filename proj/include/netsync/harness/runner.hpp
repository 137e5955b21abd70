#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netsync/harness/netcode_sim.hpp"
#include "netsync/harness/scenario.hpp"
#include "netsync/metrics/aoi.hpp"
#include "netsync/metrics/timing.hpp"

namespace netsync::harness {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_root;
  bool check = false;
};

// --out flag beats NETSYNC_OUT beats ./out.
std::filesystem::path resolve_out_root(
    const std::optional<std::string>& cli_out);

// One client's timing report built from the event rows of a run.
metrics::TimingReport build_report(
    const std::vector<metrics::EventRow>& rows, std::uint32_t client_id,
    sim::TimeUs window_end_us);

struct SeedOutcome {
  std::uint64_t seed = 0;
  nlohmann::json timing;  // contents of timing.json
  std::map<std::uint32_t, metrics::TimingReport> reports;
  std::map<std::uint32_t, metrics::Verdicts> verdicts;
  std::map<std::string, dtsched::EpisodeResult> dt;  // rows dropped
};

struct RunResult {
  std::filesystem::path scenario_dir;
  std::vector<SeedOutcome> seeds;
  nlohmann::json summary;
  bool checks_passed = true;
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opts);

class NotBracketedError : public std::runtime_error {
 public:
  explicit NotBracketedError(const std::string& what)
      : std::runtime_error(what) {}
};

struct CalibrationResult {
  double lambda = 0.0;
  double achieved_power_w = 0.0;
  int evaluations = 0;
};

// Bisects lambda until JCCS average power (over the calibration seeds)
// is within 3% of the target; power must be monotone non-increasing in
// lambda along the sweep. Throws NotBracketedError when the target lies
// outside [power(lambda_max), power(0)].
CalibrationResult calibrate_lambda(const Scenario& sc, double target_power_w);

// Rebuilds <dir>/summary.json from the per-seed timing.json files.
nlohmann::json report_dir(const std::filesystem::path& scenario_dir);

}  // namespace netsync::harness
