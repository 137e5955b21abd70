#pragma once

#include <optional>
#include <vector>

#include "netsync/proto/entity.hpp"
#include "netsync/sim/event_queue.hpp"

namespace netsync::gn {

/// Time-ordered snapshot states for one remote entity. Rendering samples
/// the buffer render_delay behind the present, interpolating linearly
/// between the two bracketing snapshots.
class InterpBuffer {
 public:
  InterpBuffer(sim::TimeUs render_delay_us, sim::TimeUs extrapolation_cap_us);

  // Sorted insert; a duplicate timestamp replaces the stored state.
  void insert(sim::TimeUs server_time_us, const proto::EntityState& state);

  // State at render_time, or nullopt while the buffer is empty. Before
  // the oldest entry: the oldest state. Past the newest: extrapolate
  // along the newest velocity up to the cap, then hold (cap 0 = pure
  // clamp — interpolation is not meant to anticipate the future).
  std::optional<proto::EntityState> sample(sim::TimeUs render_time_us) const;

  // Drops entries older than cutoff, always keeping one at/before it so
  // sampling just above the cutoff still brackets.
  void prune_before(sim::TimeUs cutoff_us);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  sim::TimeUs oldest_time_us() const { return entries_.front().t_us; }
  sim::TimeUs newest_time_us() const { return entries_.back().t_us; }
  sim::TimeUs render_delay_us() const { return render_delay_us_; }

 private:
  struct Entry {
    sim::TimeUs t_us;
    proto::EntityState state;
  };
  sim::TimeUs render_delay_us_;
  sim::TimeUs extrapolation_cap_us_;
  std::vector<Entry> entries_;  // sorted by t_us, unique
};

}  // namespace netsync::gn
