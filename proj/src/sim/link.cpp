#include "netsync/sim/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace netsync::sim {

JitterSpec JitterSpec::uniform(double low_us, double high_us) {
  JitterSpec s;
  s.kind = Kind::Uniform;
  s.low_us = low_us;
  s.high_us = high_us;
  return s;
}

JitterSpec JitterSpec::trunc_normal(double mean_us, double stddev_us) {
  JitterSpec s;
  s.kind = Kind::TruncNormal;
  s.mean_us = mean_us;
  s.stddev_us = stddev_us;
  return s;
}

JitterSpec JitterSpec::trace(std::vector<TimeUs> delays_us) {
  JitterSpec s;
  s.kind = Kind::Trace;
  s.trace_us = std::move(delays_us);
  return s;
}

void validate(const LinkModel& model) {
  if (model.base_delay_us < 0) {
    throw std::invalid_argument("link: base_delay_us must be >= 0");
  }
  if (model.loss_prob < 0.0 || model.loss_prob > 1.0) {
    throw std::invalid_argument("link: loss_prob must be in [0, 1]");
  }
  const JitterSpec& j = model.jitter;
  switch (j.kind) {
    case JitterSpec::Kind::None:
      break;
    case JitterSpec::Kind::Uniform:
      if (j.low_us < 0.0 || j.high_us < j.low_us) {
        throw std::invalid_argument(
            "link: uniform jitter needs 0 <= low <= high");
      }
      break;
    case JitterSpec::Kind::TruncNormal:
      if (j.stddev_us < 0.0) {
        throw std::invalid_argument("link: jitter stddev must be >= 0");
      }
      break;
    case JitterSpec::Kind::Trace:
      if (j.trace_us.empty()) {
        throw std::invalid_argument("link: trace jitter needs >= 1 entry");
      }
      for (TimeUs d : j.trace_us) {
        if (d < 0) {
          throw std::invalid_argument("link: trace delays must be >= 0");
        }
      }
      break;
  }
  if (model.bandwidth_bytes_per_s && *model.bandwidth_bytes_per_s <= 0.0) {
    throw std::invalid_argument("link: bandwidth must be > 0 when set");
  }
}

Link::Link(LinkModel model, RngStream rng)
    : model_(std::move(model)), rng_(std::move(rng)) {
  validate(model_);
}

TimeUs Link::sample_jitter_us() {
  const JitterSpec& j = model_.jitter;
  switch (j.kind) {
    case JitterSpec::Kind::None:
      return 0;
    case JitterSpec::Kind::Uniform:
      return static_cast<TimeUs>(std::llround(rng_.uniform(j.low_us, j.high_us)));
    case JitterSpec::Kind::TruncNormal: {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double v = rng_.normal(j.mean_us, j.stddev_us);
        if (v >= 0.0) {
          return static_cast<TimeUs>(std::llround(v));
        }
      }
      return 0;  // pathological spec (mean far below zero); floor it
    }
    case JitterSpec::Kind::Trace: {
      const TimeUs d = j.trace_us[trace_pos_ % j.trace_us.size()];
      ++trace_pos_;
      return d;
    }
  }
  return 0;
}

std::optional<TimeUs> Link::send(TimeUs now_us, std::size_t size_bytes) {
  if (rng_.bernoulli(model_.loss_prob)) {
    return std::nullopt;
  }
  TimeUs delay = model_.base_delay_us + sample_jitter_us();
  if (model_.bandwidth_bytes_per_s) {
    const double ser_us =
        static_cast<double>(size_bytes) / *model_.bandwidth_bytes_per_s * 1e6;
    delay += static_cast<TimeUs>(std::ceil(ser_us));
  }
  TimeUs delivery = now_us + delay;
  if (!model_.reorder_allowed) {
    delivery = std::max(delivery, last_delivery_us_);
  }
  last_delivery_us_ = delivery;
  return delivery;
}

}  // namespace netsync::sim
