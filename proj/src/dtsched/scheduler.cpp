#include "netsync/dtsched/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace netsync::dtsched {

void validate(const SensorMeta& s, std::size_t num_objects) {
  if (s.object >= num_objects) {
    throw std::invalid_argument("sensor " + std::to_string(s.sensor_id) +
                                " targets unknown object");
  }
  if (s.r <= 0.0) {
    throw std::invalid_argument("sensor noise variance must be > 0");
  }
  if (s.energy_j <= 0.0) {
    throw std::invalid_argument("sensor query energy must be > 0");
  }
}

void validate(const SchedulePolicy& p) {
  if (p.lambda < 0.0) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (p.variance_gate <= 0.0) {
    throw std::invalid_argument("variance_gate must be > 0");
  }
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "jccs") {
    return PolicyKind::kJccs;
  }
  if (name == "cost_bg") {
    return PolicyKind::kCostBg;
  }
  if (name == "confidence_bg") {
    return PolicyKind::kConfBg;
  }
  if (name == "rc") {
    return PolicyKind::kRc;
  }
  throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kJccs:
      return "jccs";
    case PolicyKind::kCostBg:
      return "cost_bg";
    case PolicyKind::kConfBg:
      return "confidence_bg";
    case PolicyKind::kRc:
      return "rc";
  }
  return "jccs";
}

namespace {

double component_variance(const Belief& b, int component) {
  return component == 0 ? b.cov.a11 : b.cov.a22;
}

std::vector<std::size_t> eligible_sensors(
    const std::vector<Belief>& predicted,
    const std::vector<SensorMeta>& sensors, double gate) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const SensorMeta& s = sensors[i];
    if (component_variance(predicted[s.object], s.component()) > gate) {
      out.push_back(i);
    }
  }
  return out;  // ascending index order == ascending sensor_id in practice
}

std::vector<std::size_t> greedy_jccs(const std::vector<Belief>& predicted,
                                     const std::vector<SensorMeta>& sensors,
                                     const std::vector<std::size_t>& eligible,
                                     const SchedulePolicy& policy) {
  // Working covariances track the tentative updates of chosen sensors.
  std::vector<Mat2> cov(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    cov[i] = predicted[i].cov;
  }
  std::vector<bool> taken(sensors.size(), false);
  std::vector<std::size_t> chosen;
  while (chosen.size() < policy.max_queries) {
    double best_score = 0.0;
    std::size_t best = sensors.size();
    for (std::size_t idx : eligible) {
      if (taken[idx]) {
        continue;
      }
      const SensorMeta& s = sensors[idx];
      const double score =
          voi(cov[s.object], s.component(), s.r) - policy.lambda * s.energy_j;
      const bool better =
          best == sensors.size()
              ? score > 0.0
              : (score > best_score ||
                 (score == best_score && s.sensor_id < sensors[best].sensor_id));
      if (better && score > 0.0) {
        best_score = score;
        best = idx;
      }
    }
    if (best == sensors.size()) {
      break;  // no remaining sensor has a positive marginal score
    }
    taken[best] = true;
    chosen.push_back(best);
    const SensorMeta& s = sensors[best];
    cov[s.object] = covariance_after_update(cov[s.object], s.component(), s.r);
  }
  return chosen;
}

}  // namespace

std::vector<std::size_t> select_sensors(const std::vector<Belief>& predicted,
                                        const std::vector<SensorMeta>& sensors,
                                        const SchedulePolicy& policy,
                                        sim::RngStream* rc_rng) {
  validate(policy);
  std::vector<std::size_t> eligible =
      eligible_sensors(predicted, sensors, policy.variance_gate);
  if (eligible.empty() || policy.max_queries == 0) {
    return {};
  }

  switch (policy.kind) {
    case PolicyKind::kJccs:
      return greedy_jccs(predicted, sensors, eligible, policy);

    case PolicyKind::kCostBg: {
      std::stable_sort(eligible.begin(), eligible.end(),
                       [&](std::size_t a, std::size_t b) {
                         if (sensors[a].energy_j != sensors[b].energy_j) {
                           return sensors[a].energy_j < sensors[b].energy_j;
                         }
                         return sensors[a].sensor_id < sensors[b].sensor_id;
                       });
      if (eligible.size() > policy.max_queries) {
        eligible.resize(policy.max_queries);
      }
      return eligible;
    }

    case PolicyKind::kConfBg: {
      auto key = [&](std::size_t i) {
        if (policy.confidence_uses_posterior) {
          const SensorMeta& s = sensors[i];
          return component_variance(predicted[s.object], s.component());
        }
        return sensors[i].r;
      };
      std::stable_sort(eligible.begin(), eligible.end(),
                       [&](std::size_t a, std::size_t b) {
                         if (key(a) != key(b)) {
                           return key(a) < key(b);
                         }
                         return sensors[a].sensor_id < sensors[b].sensor_id;
                       });
      if (eligible.size() > policy.max_queries) {
        eligible.resize(policy.max_queries);
      }
      return eligible;
    }

    case PolicyKind::kRc: {
      if (rc_rng == nullptr) {
        throw std::invalid_argument("RC policy needs a random stream");
      }
      // Partial Fisher-Yates over the id-ordered eligible list.
      const std::size_t k = std::min(policy.max_queries, eligible.size());
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(
                    rc_rng->uniform_int(static_cast<std::uint64_t>(
                        eligible.size() - i)));
        std::swap(eligible[i], eligible[j]);
      }
      eligible.resize(k);
      return eligible;
    }
  }
  return {};
}

double subset_score(const std::vector<Belief>& predicted,
                    const std::vector<SensorMeta>& sensors,
                    const std::vector<std::size_t>& chosen, double lambda) {
  std::vector<Mat2> cov(predicted.size());
  double before = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    cov[i] = predicted[i].cov;
    before += cov[i].trace();
  }
  double energy = 0.0;
  for (std::size_t idx : chosen) {
    const SensorMeta& s = sensors[idx];
    cov[s.object] = covariance_after_update(cov[s.object], s.component(), s.r);
    energy += s.energy_j;
  }
  double after = 0.0;
  for (const Mat2& m : cov) {
    after += m.trace();
  }
  return (before - after) - lambda * energy;
}

}  // namespace netsync::dtsched
