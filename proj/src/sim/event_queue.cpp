#include "netsync/sim/event_queue.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace netsync::sim {

std::uint64_t Simulator::schedule_at(TimeUs fire_time_us, NodeId target,
                                     std::function<void()> action) {
  if (fire_time_us < now_) {
    throw std::logic_error("Simulator::schedule_at: fire time " +
                           std::to_string(fire_time_us) + " is before now " +
                           std::to_string(now_));
  }
  const std::uint64_t seq = next_seq_++;
  queue_.emplace(std::make_pair(fire_time_us, seq),
                 Entry{target, std::move(action)});
  return seq;
}

std::uint64_t Simulator::schedule_in(TimeUs delay_us, NodeId target,
                                     std::function<void()> action) {
  return schedule_at(now_ + delay_us, target, std::move(action));
}

std::size_t Simulator::run_until(TimeUs t_end_us) {
  if (t_end_us < now_) {
    throw std::logic_error("Simulator::run_until: t_end is before now");
  }
  std::size_t dispatched = 0;
  while (!queue_.empty() && queue_.begin()->first.first <= t_end_us) {
    auto node = queue_.extract(queue_.begin());
    const TimeUs fire = node.key().first;
    const std::uint64_t seq = node.key().second;
    Entry entry = std::move(node.mapped());
    now_ = fire;
    if (trace_enabled_) {
      trace_.push_back({fire, seq, entry.target});
    }
    entry.action();
    ++dispatched;
  }
  now_ = t_end_us;
  return dispatched;
}

}  // namespace netsync::sim
