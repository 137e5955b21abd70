#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netsync/dtsched/kalman.hpp"
#include "netsync/sim/rng.hpp"

namespace netsync::dtsched {

enum class SensorKind : std::uint8_t { kPosition = 0, kVelocity = 1 };

struct SensorMeta {
  std::uint32_t sensor_id = 0;
  SensorKind kind = SensorKind::kPosition;
  std::uint32_t object = 0;  // index into the belief vector
  double r = 0.1;            // measurement noise variance
  double energy_j = 0.04;    // energy per query, joules

  int component() const { return kind == SensorKind::kPosition ? 0 : 1; }
};

void validate(const SensorMeta& s, std::size_t num_objects);

enum class PolicyKind : std::uint8_t { kJccs = 0, kCostBg, kConfBg, kRc };

PolicyKind policy_from_name(const std::string& name);
std::string policy_name(PolicyKind kind);

struct SchedulePolicy {
  PolicyKind kind = PolicyKind::kJccs;
  double lambda = 5.0;        // cost weight, score = VoI - lambda * energy
  double variance_gate = 0.5; // sensors fire only above this predicted var
  std::size_t max_queries = 8;
  // Alternative reading of "confidence" for Confidence-BG: rank by the
  // predicted variance of the sensed component instead of sensor noise.
  bool confidence_uses_posterior = false;
};

void validate(const SchedulePolicy& p);

// Picks the sensors to query this slot (indices into `sensors`, in
// selection order, size <= max_queries). All policies share the
// reliability gate: only sensors whose target component's predicted
// variance exceeds variance_gate are eligible.
//   JCCS:    greedy on marginal VoI - lambda*energy, recomputing VoI
//            after each tentative update; stops at non-positive score.
//   CostBg:  eligible ascending by energy, take K.
//   ConfBg:  eligible ascending by r (most certain measurements), take K.
//   Rc:      uniform K-subset of the eligible (seeded stream).
// Ties break toward the lower sensor_id.
std::vector<std::size_t> select_sensors(const std::vector<Belief>& predicted,
                                        const std::vector<SensorMeta>& sensors,
                                        const SchedulePolicy& policy,
                                        sim::RngStream* rc_rng = nullptr);

// Set objective for oracle tests: total trace reduction of applying all
// of `chosen` (order-independent) minus lambda * total energy.
double subset_score(const std::vector<Belief>& predicted,
                    const std::vector<SensorMeta>& sensors,
                    const std::vector<std::size_t>& chosen, double lambda);

}  // namespace netsync::dtsched
