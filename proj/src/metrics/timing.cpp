#include "netsync/metrics/timing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netsync::metrics {

double estimate_offset(const SyncExchange& x) {
  return (static_cast<double>(x.t2 - x.t1) - static_cast<double>(x.t4 - x.t3)) /
         2.0;
}

double estimate_path_delay(const SyncExchange& x) {
  return (static_cast<double>(x.t2 - x.t1) + static_cast<double>(x.t4 - x.t3)) /
         2.0;
}

SlidingMedian::SlidingMedian(std::size_t window) : capacity_(window) {
  if (window == 0) {
    throw std::invalid_argument("median window must be > 0");
  }
}

void SlidingMedian::add(double v) {
  window_.push_back(v);
  if (window_.size() > capacity_) {
    window_.pop_front();
  }
}

std::optional<double> SlidingMedian::median() const {
  if (window_.empty()) {
    return std::nullopt;
  }
  std::vector<double> sorted(window_.begin(), window_.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) {
    return sorted[n / 2];
  }
  return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  return sum / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    return 0.0;
  }
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) {
    acc += (x - m) * (x - m);
  }
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) {
    return 0.0;
  }
  if (p < 0.0 || p > 100.0) {
    throw std::invalid_argument("percentile out of range");
  }
  std::sort(xs.begin(), xs.end());
  if (p == 0.0) {
    return xs.front();
  }
  // Nearest-rank.
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(xs.size())));
  return xs[rank - 1];
}

Preset preset_from_name(const std::string& name) {
  if (name == "none" || name.empty()) {
    return Preset::kNone;
  }
  if (name == "fps") {
    return Preset::kFps;
  }
  if (name == "vr") {
    return Preset::kVr;
  }
  if (name == "iiot") {
    return Preset::kIiot;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::kNone:
      return "none";
    case Preset::kFps:
      return "fps";
    case Preset::kVr:
      return "vr";
    case Preset::kIiot:
      return "iiot";
  }
  return "none";
}

namespace {

Requirement at_most(const std::string& name, double measured,
                    double threshold) {
  return {name, measured, threshold, measured <= threshold};
}

Requirement at_least(const std::string& name, double measured,
                     double threshold) {
  return {name, measured, threshold, measured >= threshold};
}

}  // namespace

Verdicts classify(const TimingReport& report, Preset preset) {
  Verdicts v;
  v.preset = preset;
  const double rtt_us = 2.0 * report.mean_one_way_us;
  switch (preset) {
    case Preset::kNone:
      break;
    case Preset::kFps:
      v.requirements.push_back(at_most("rtt_us", rtt_us, 100'000.0));
      break;
    case Preset::kVr:
      v.requirements.push_back(at_most("rtt_us", rtt_us, 20'000.0));
      v.requirements.push_back(
          at_most("transmission_us", report.mean_one_way_us, 7'000.0));
      break;
    case Preset::kIiot:
      v.requirements.push_back(
          at_most("max_one_way_us", report.max_one_way_us, 1'000.0));
      v.requirements.push_back(
          at_least("delivery_ratio", report.delivery_ratio, 0.999999));
      break;
  }
  for (const Requirement& r : v.requirements) {
    v.overall = v.overall && r.pass;
  }
  return v;
}

}  // namespace netsync::metrics
