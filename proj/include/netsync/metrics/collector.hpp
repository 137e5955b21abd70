#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netsync/sim/event_queue.hpp"

namespace netsync::metrics {

/// One simulation event. Column meaning depends on kind (see README):
///   snap_send / snap_recv / snap_lost: client=receiver, id=tick,
///     gen_time=snapshot server_time, value=send time µs, value2=bytes
///   input_send / input_recv / input_lost: client=sender, id=newest seq
///     in the batch, gen_time=issue time of that seq, value=batch count,
///     value2=bytes
///   tick: id=tick, gen_time=nominal tick time, time=processed, value=#inputs
///   fire: client=shooter, id=fire index, gen_time=view time,
///     value=compensated hit (0/1), value2=uncompensated hit (0/1)
///   reconcile: client, id=acked seq, value=correction magnitude
///   render: client, id=entity, value=x, value2=y
///   sync: client, value=offset estimate µs, value2=path delay estimate µs
///   disconnect: client, id=tick
struct EventRow {
  sim::TimeUs time_us = 0;
  std::string kind;
  std::uint32_t client_id = 0;
  std::uint64_t id = 0;
  sim::TimeUs gen_time_us = 0;
  double value = 0.0;
  double value2 = 0.0;
};

class Collector {
 public:
  void record(EventRow row) { rows_.push_back(std::move(row)); }
  const std::vector<EventRow>& rows() const { return rows_; }
  void clear() { rows_.clear(); }

  // Renders rows as CSV in recorded order (deterministic: the simulation
  // is single-threaded and event order is total).
  std::string to_csv() const;

 private:
  std::vector<EventRow> rows_;
};

}  // namespace netsync::metrics
