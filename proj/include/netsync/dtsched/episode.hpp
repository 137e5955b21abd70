#pragma once

#include <cstdint>
#include <vector>

#include "netsync/dtsched/scheduler.hpp"
#include "netsync/sim/link.hpp"

namespace netsync::dtsched {

/// Digital-twin tracking scenario: M independent objects, one position
/// and one velocity sensor each, queried over a lossy link under a
/// per-slot connection budget.
struct DtScenario {
  std::size_t num_objects = 40;
  double tau_s = 0.1;
  double q = 0.01;
  // When > q, per-object process noise is log-uniform in [q, q_max]
  // (drawn from the policy-independent "dt.process" stream), so objects
  // drift at different rates. 0 keeps every object at q.
  double q_max = 0.0;
  std::uint64_t horizon_slots = 10'000;
  double r_position = 0.25;   // m^2
  double r_velocity = 0.09;   // (m/s)^2
  double energy_min_j = 0.030;
  double energy_max_j = 0.050;
  std::size_t max_queries = 8;  // K
  double variance_gate = 0.5;
  double lambda = 5.0;
  bool confidence_uses_posterior = false;
  double initial_pos_var = 1.0;
  double initial_vel_var = 1.0;
  double query_loss_prob = 0.1;  // lost queries still consume energy
};

void validate(const DtScenario& sc);

// The 2M sensors of a scenario; energies drawn from the seeded "dt.energy"
// stream so every policy sees identical hardware.
std::vector<SensorMeta> build_sensors(const DtScenario& sc,
                                      std::uint64_t seed);

struct SlotRow {
  std::uint64_t slot = 0;
  double energy_j = 0.0;       // energy spent this slot
  double mrmse_contrib = 0.0;  // sqrt(mean squared error over 2M components)
  std::uint32_t queries = 0;
  std::uint32_t delivered = 0;
};

struct EpisodeResult {
  double avg_power_w = 0.0;
  double mrmse = 0.0;
  double total_energy_j = 0.0;
  std::uint64_t total_queries = 0;
  std::uint64_t delivered_queries = 0;
  // Time-averaged squared error over time-averaged posterior variance;
  // ~1 for a calibrated filter.
  double consistency_ratio = 0.0;
  std::vector<SlotRow> rows;
};

// Simulates ground truth and the DT side-by-side for one policy. The
// truth trajectory depends only on (scenario, seed), never on the
// policy, so policies compete on identical realizations.
EpisodeResult run_episode(const DtScenario& sc, PolicyKind policy,
                          std::uint64_t seed, bool keep_rows = true);

}  // namespace netsync::dtsched
