#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "netsync/sim/event_queue.hpp"

namespace netsync::metrics {

/// One two-way time-transfer exchange: master send (t1), slave receive
/// (t2), slave send (t3), master receive (t4). t1/t4 are master-clock
/// readings, t2/t3 slave-clock readings.
struct SyncExchange {
  sim::TimeUs t1 = 0;
  sim::TimeUs t2 = 0;
  sim::TimeUs t3 = 0;
  sim::TimeUs t4 = 0;
};

// Slave-minus-master offset estimate ((t2-t1) - (t4-t3)) / 2. Exact when
// forward and reverse delays match; error is (d_f - d_r)/2 otherwise.
double estimate_offset(const SyncExchange& x);

// Mean path delay estimate ((t2-t1) + (t4-t3)) / 2.
double estimate_path_delay(const SyncExchange& x);

/// Median over the last k samples; damps jitter in per-exchange estimates.
class SlidingMedian {
 public:
  explicit SlidingMedian(std::size_t window);

  void add(double v);
  std::optional<double> median() const;
  std::size_t count() const { return window_.size(); }

 private:
  std::size_t capacity_;
  std::deque<double> window_;
};

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);  // 0 for n < 2
// Nearest-rank percentile, p in [0,100]; xs need not be sorted.
double percentile(std::vector<double> xs, double p);

enum class Preset { kNone, kFps, kVr, kIiot };

Preset preset_from_name(const std::string& name);  // "none" | "fps" | "vr" | "iiot"
std::string preset_name(Preset p);

struct TimingReport {
  double mean_one_way_us = 0.0;
  double max_one_way_us = 0.0;
  double jitter_stddev_us = 0.0;
  double jitter_p99_spread_us = 0.0;  // p99 minus minimum one-way delay
  double avg_aoi_us = 0.0;
  double peak_aoi_us = 0.0;
  double out_of_order_fraction = 0.0;
  double loss_fraction = 0.0;
  double delivery_ratio = 1.0;
  double mean_correction = 0.0;  // reconciliation snap magnitude, world units
  double max_correction = 0.0;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
};

struct Requirement {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;  // measured vs threshold per the requirement's direction
};

struct Verdicts {
  Preset preset = Preset::kNone;
  std::vector<Requirement> requirements;
  bool overall = true;
};

// Threshold compliance per preset:
//   fps:  round-trip (2 x mean one-way) <= 100 ms
//   vr:   round-trip <= 20 ms and mean one-way (transmission) <= 7 ms
//   iiot: max one-way <= 1 ms and delivery ratio >= 0.999999
Verdicts classify(const TimingReport& report, Preset preset);

}  // namespace netsync::metrics
