#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netsync/sim/event_queue.hpp"

namespace netsync::metrics {

/// Age-of-information sawtooth built from (generation, delivery) pairs.
/// Only effective deliveries — those carrying a strictly fresher
/// generation than anything delivered earlier — reset the age; stale
/// packets never reduce it.
class AoiProcess {
 public:
  void add_delivery(sim::TimeUs generation_us, sim::TimeUs delivery_us);

  // Age at t, or nullopt before the first delivery.
  std::optional<sim::TimeUs> age_at(sim::TimeUs t_us) const;

  std::optional<sim::TimeUs> first_delivery_us() const;

  struct Stats {
    double average_us = 0.0;
    sim::TimeUs peak_us = 0;
  };
  // Exact sawtooth integral over [t_start, t_end]; t_start must be at or
  // after the first delivery. The peak includes the closing age at t_end.
  Stats stats(sim::TimeUs t_start_us, sim::TimeUs t_end_us) const;

  std::size_t effective_count() const;

 private:
  struct Delivery {
    sim::TimeUs gen_us;
    sim::TimeUs del_us;
  };
  void rebuild() const;

  std::vector<Delivery> raw_;
  // Effective deliveries: sorted by delivery time, strictly increasing in
  // generation. Lazily derived from raw_.
  mutable std::vector<Delivery> effective_;
  mutable bool dirty_ = false;
};

}  // namespace netsync::metrics
