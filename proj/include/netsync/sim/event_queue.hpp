#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace netsync::sim {

// All simulated time is integer microseconds.
using TimeUs = std::int64_t;
using NodeId = std::uint32_t;

struct DispatchRecord {
  TimeUs time_us = 0;
  std::uint64_t seq = 0;
  NodeId target = 0;
};

/// Single-threaded discrete-event loop. Events with equal fire time dispatch
/// in insertion (seq) order, so a run is fully determined by its inputs.
class Simulator {
 public:
  TimeUs now() const { return now_; }

  // Rejects fire times in the past: that is always a logic bug in the caller.
  std::uint64_t schedule_at(TimeUs fire_time_us, NodeId target,
                            std::function<void()> action);
  std::uint64_t schedule_in(TimeUs delay_us, NodeId target,
                            std::function<void()> action);

  // Dispatches every event with fire_time <= t_end, then sets now = t_end.
  // Returns the number of dispatches (including cascades scheduled mid-run).
  std::size_t run_until(TimeUs t_end_us);

  std::size_t pending() const { return queue_.size(); }

  void set_trace_enabled(bool on) { trace_enabled_ = on; }
  const std::vector<DispatchRecord>& trace() const { return trace_; }

 private:
  struct Entry {
    NodeId target;
    std::function<void()> action;
  };

  // Keyed by (fire_time, seq): total order, deterministic ties.
  std::map<std::pair<TimeUs, std::uint64_t>, Entry> queue_;
  TimeUs now_ = 0;
  std::uint64_t next_seq_ = 0;
  bool trace_enabled_ = false;
  std::vector<DispatchRecord> trace_;
};

}  // namespace netsync::sim
