#include "netsync/metrics/aoi.hpp"

#include <algorithm>
#include <stdexcept>

namespace netsync::metrics {

void AoiProcess::add_delivery(sim::TimeUs generation_us,
                              sim::TimeUs delivery_us) {
  if (delivery_us < generation_us) {
    throw std::invalid_argument("delivery precedes generation");
  }
  raw_.push_back({generation_us, delivery_us});
  dirty_ = true;
}

void AoiProcess::rebuild() const {
  effective_.clear();
  std::vector<Delivery> sorted = raw_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Delivery& a, const Delivery& b) {
                     if (a.del_us != b.del_us) {
                       return a.del_us < b.del_us;
                     }
                     return a.gen_us < b.gen_us;
                   });
  for (const Delivery& d : sorted) {
    if (effective_.empty() || d.gen_us > effective_.back().gen_us) {
      effective_.push_back(d);
    }
  }
  dirty_ = false;
}

std::optional<sim::TimeUs> AoiProcess::first_delivery_us() const {
  if (dirty_) {
    rebuild();
  }
  if (effective_.empty()) {
    return std::nullopt;
  }
  return effective_.front().del_us;
}

std::size_t AoiProcess::effective_count() const {
  if (dirty_) {
    rebuild();
  }
  return effective_.size();
}

std::optional<sim::TimeUs> AoiProcess::age_at(sim::TimeUs t_us) const {
  if (dirty_) {
    rebuild();
  }
  // Last effective delivery with del <= t; generations increase along
  // effective_, so it carries the freshest generation available at t.
  const auto it = std::upper_bound(
      effective_.begin(), effective_.end(), t_us,
      [](sim::TimeUs t, const Delivery& d) { return t < d.del_us; });
  if (it == effective_.begin()) {
    return std::nullopt;  // nothing delivered yet
  }
  return t_us - std::prev(it)->gen_us;
}

AoiProcess::Stats AoiProcess::stats(sim::TimeUs t_start_us,
                                    sim::TimeUs t_end_us) const {
  if (dirty_) {
    rebuild();
  }
  if (t_end_us <= t_start_us) {
    throw std::invalid_argument("empty observation window");
  }
  if (effective_.empty() || t_start_us < effective_.front().del_us) {
    throw std::logic_error("window begins before first delivery");
  }

  // Piecewise-linear age with slope 1 and drops at effective deliveries.
  // Per segment [s, e) with active generation g:
  //   integral = ((e-g)^2 - (s-g)^2) / 2 = (e-s)(s+e-2g)/2.
  // Accumulated as 2x the integral in __int128, which is exact.
  __int128 twice_integral = 0;
  sim::TimeUs peak = 0;
  sim::TimeUs seg_start = t_start_us;
  const auto age0 = age_at(t_start_us);
  sim::TimeUs gen = t_start_us - *age0;

  auto close_segment = [&](sim::TimeUs seg_end) {
    if (seg_end > seg_start) {
      twice_integral += static_cast<__int128>(seg_end - seg_start) *
                        (seg_end + seg_start - 2 * gen);
    }
    peak = std::max(peak, seg_end - gen);  // age just before the drop
  };

  for (const Delivery& d : effective_) {
    if (d.del_us <= t_start_us) {
      continue;
    }
    if (d.del_us > t_end_us) {
      break;
    }
    close_segment(d.del_us);
    seg_start = d.del_us;
    gen = d.gen_us;
  }
  close_segment(t_end_us);

  Stats out;
  out.peak_us = peak;
  out.average_us = static_cast<double>(
      static_cast<long double>(twice_integral) /
      (2.0L * static_cast<long double>(t_end_us - t_start_us)));
  return out;
}

}  // namespace netsync::metrics
