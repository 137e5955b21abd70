#include "netsync/gn/history.hpp"

#include <algorithm>
#include <stdexcept>

namespace netsync::gn {

WorldHistory::WorldHistory(sim::TimeUs horizon_us) : horizon_us_(horizon_us) {
  if (horizon_us <= 0) {
    throw std::invalid_argument("history horizon must be > 0");
  }
}

void WorldHistory::push(HistoryFrame frame) {
  if (!frames_.empty() &&
      frame.server_time_us <= frames_.back().server_time_us) {
    throw std::logic_error("history frames must strictly increase in time");
  }
  frames_.push_back(std::move(frame));
  prune();
}

void WorldHistory::prune() {
  const sim::TimeUs cutoff = frames_.back().server_time_us - horizon_us_;
  // Keep one frame at/before the cutoff so rewind(newest - horizon) can
  // still bracket.
  while (frames_.size() >= 2 && frames_[1].server_time_us <= cutoff) {
    frames_.pop_front();
  }
}

RewindResult WorldHistory::rewind(sim::TimeUs t_target_us) const {
  if (frames_.empty()) {
    throw std::logic_error("rewind on empty history");
  }
  RewindResult out;
  if (t_target_us >= frames_.back().server_time_us) {
    out.entities = frames_.back().entities;
    return out;
  }
  if (t_target_us <= frames_.front().server_time_us) {
    out.entities = frames_.front().entities;
    out.too_old =
        t_target_us < frames_.back().server_time_us - horizon_us_ ||
        t_target_us < frames_.front().server_time_us;
    return out;
  }
  // First frame with server_time > t_target; its predecessor is <= t_target.
  const auto after = std::upper_bound(
      frames_.begin(), frames_.end(), t_target_us,
      [](sim::TimeUs t, const HistoryFrame& f) { return t < f.server_time_us; });
  const HistoryFrame& hi = *after;
  const HistoryFrame& lo = *std::prev(after);
  if (lo.server_time_us == t_target_us) {
    out.entities = lo.entities;
    return out;
  }
  out.entities.reserve(hi.entities.size());
  for (const proto::EntityState& b : hi.entities) {
    const proto::EntityState* a = nullptr;
    for (const proto::EntityState& cand : lo.entities) {
      if (cand.entity_id == b.entity_id) {
        a = &cand;
        break;
      }
    }
    if (a == nullptr) {
      out.entities.push_back(b);  // spawned between frames: take newer state
      continue;
    }
    out.entities.push_back(proto::lerp_state(
        *a, b, lo.server_time_us, hi.server_time_us, t_target_us));
  }
  return out;
}

}  // namespace netsync::gn
