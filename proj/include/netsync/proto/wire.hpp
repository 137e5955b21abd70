#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netsync/proto/messages.hpp"

// Fixed-width little-endian wire formats.
//
//   Snapshot: header {version u8 = 1, tick u64, server_time_us u64,
//             count u16} followed by count entries
//             {entity_id u32, pos_x f64, pos_y f64, vel_x f64, vel_y f64,
//              acked_input_seq u32}.
//   InputCommand: {client_id u32, input_seq u32, issued_at_us u64,
//                  action_tag u8, payload_x f64, payload_y f64}.
//   Input batch (one datagram, redundancy window): {version u8 = 1,
//                  count u8} followed by count InputCommands.
//
// acked_input_seq on the wire is EntityState::last_input_seq; for the
// receiving client's own entity it is the input ack.

namespace netsync::proto {

class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_input(const InputCommand& cmd);
InputCommand decode_input(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_input_batch(
    const std::vector<InputCommand>& cmds);
std::vector<InputCommand> decode_input_batch(
    std::span<const std::uint8_t> bytes);

inline constexpr std::size_t kSnapshotHeaderBytes = 1 + 8 + 8 + 2;
inline constexpr std::size_t kSnapshotEntryBytes = 4 + 8 * 4 + 4;
inline constexpr std::size_t kInputCommandBytes = 4 + 4 + 8 + 1 + 8 * 2;
inline constexpr std::size_t kInputBatchHeaderBytes = 1 + 1;
inline constexpr std::size_t kInputBatchMaxCount = 64;

inline std::size_t snapshot_wire_size(std::size_t entry_count) {
  return kSnapshotHeaderBytes + entry_count * kSnapshotEntryBytes;
}

}  // namespace netsync::proto
