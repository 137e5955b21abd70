#pragma once

#include <cstdint>
#include <vector>

#include "netsync/proto/entity.hpp"
#include "netsync/sim/event_queue.hpp"

namespace netsync::proto {

inline constexpr std::uint8_t kProtocolVersion = 1;

enum class ActionKind : std::uint8_t {
  kMove = 0,  // payload = (dir_x, dir_y), normalized server-side
  kFire = 1,  // payload = (aim_x, aim_y), world-space target point
  kIdle = 2,  // payload ignored
};

/// One client input. issued_at_us is the client's local clock at issue
/// time; the server echoes the latest applied seq back in snapshots.
struct InputCommand {
  std::uint32_t client_id = 0;
  std::uint32_t input_seq = 0;
  std::int64_t issued_at_us = 0;  // encoded as u64 on the wire
  ActionKind action = ActionKind::kIdle;
  double payload_x = 0.0;
  double payload_y = 0.0;

  bool operator==(const InputCommand& o) const = default;
};

/// Authoritative world slice emitted at the end of a server tick.
/// Entries carry last_input_seq, which doubles as the per-client input
/// ack when the entry describes that client's own entity.
struct Snapshot {
  std::uint64_t tick = 0;
  sim::TimeUs server_time_us = 0;
  std::vector<EntityState> entries;

  bool operator==(const Snapshot& o) const = default;
};

}  // namespace netsync::proto
