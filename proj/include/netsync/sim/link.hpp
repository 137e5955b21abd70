#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "netsync/sim/event_queue.hpp"
#include "netsync/sim/rng.hpp"

namespace netsync::sim {

struct JitterSpec {
  enum class Kind { None, Uniform, TruncNormal, Trace };
  Kind kind = Kind::None;
  // Uniform bounds, microseconds (0 <= low <= high).
  double low_us = 0.0;
  double high_us = 0.0;
  // Truncated normal: samples below zero are redrawn.
  double mean_us = 0.0;
  double stddev_us = 0.0;
  // Recorded delays, cycled in order.
  std::vector<TimeUs> trace_us;

  static JitterSpec none() { return {}; }
  static JitterSpec uniform(double low_us, double high_us);
  static JitterSpec trunc_normal(double mean_us, double stddev_us);
  static JitterSpec trace(std::vector<TimeUs> delays_us);
};

struct LinkModel {
  TimeUs base_delay_us = 0;
  JitterSpec jitter;
  double loss_prob = 0.0;
  bool reorder_allowed = false;
  // Bytes per second; adds size/bandwidth serialization time when set.
  std::optional<double> bandwidth_bytes_per_s;
};

// Throws std::invalid_argument on out-of-range fields.
void validate(const LinkModel& model);

/// One directed impaired link. Owns its RNG stream, so traffic on other
/// links never changes this link's delay/loss samples.
class Link {
 public:
  Link(LinkModel model, RngStream rng);

  // Delivery time for a message sent at `now`, or nullopt when dropped.
  // With reorder_allowed=false the result is clamped so per-link delivery
  // times are non-decreasing in send order.
  std::optional<TimeUs> send(TimeUs now_us, std::size_t size_bytes = 0);

  const LinkModel& model() const { return model_; }

 private:
  TimeUs sample_jitter_us();

  LinkModel model_;
  RngStream rng_;
  TimeUs last_delivery_us_ = 0;
  std::size_t trace_pos_ = 0;
};

}  // namespace netsync::sim
