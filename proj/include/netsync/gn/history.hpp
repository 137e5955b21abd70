#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "netsync/proto/entity.hpp"
#include "netsync/sim/event_queue.hpp"

namespace netsync::gn {

struct HistoryFrame {
  std::uint64_t tick = 0;
  sim::TimeUs server_time_us = 0;
  std::vector<proto::EntityState> entities;
};

struct RewindResult {
  std::vector<proto::EntityState> entities;
  bool too_old = false;  // t_target fell below the horizon; oldest frame used
};

/// Ring of authoritative frames for lag compensation. Frames are pushed
/// in tick order; rewind interpolates between the two frames bracketing
/// a past instant.
class WorldHistory {
 public:
  explicit WorldHistory(sim::TimeUs horizon_us);

  void push(HistoryFrame frame);

  // States at t_target, linearly interpolated between bracketing frames.
  // Clamps to the newest frame if t_target is ahead of it; clamps to the
  // oldest and sets too_old if t_target precedes the horizon span.
  RewindResult rewind(sim::TimeUs t_target_us) const;

  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  const HistoryFrame& newest() const { return frames_.back(); }
  const HistoryFrame& oldest() const { return frames_.front(); }
  sim::TimeUs horizon_us() const { return horizon_us_; }

 private:
  void prune();

  sim::TimeUs horizon_us_;
  std::deque<HistoryFrame> frames_;
};

}  // namespace netsync::gn
