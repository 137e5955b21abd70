#include "netsync/proto/wire.hpp"

#include <bit>
#include <cstring>

namespace netsync::proto {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms unsupported");

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }

  template <typename T>
  void le(T v) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }

  template <typename T>
  T le() {
    static_assert(std::is_unsigned_v<T>);
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw DecodeError("trailing bytes after message");
    }
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw DecodeError("truncated message");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_entry(Writer& w, const EntityState& e) {
  w.le<std::uint32_t>(e.entity_id);
  w.f64(e.position.x);
  w.f64(e.position.y);
  w.f64(e.velocity.x);
  w.f64(e.velocity.y);
  w.le<std::uint32_t>(e.last_input_seq);
}

EntityState read_entry(Reader& r) {
  EntityState e;
  e.entity_id = r.le<std::uint32_t>();
  e.position.x = r.f64();
  e.position.y = r.f64();
  e.velocity.x = r.f64();
  e.velocity.y = r.f64();
  e.last_input_seq = r.le<std::uint32_t>();
  return e;
}

void write_input(Writer& w, const InputCommand& cmd) {
  w.le<std::uint32_t>(cmd.client_id);
  w.le<std::uint32_t>(cmd.input_seq);
  w.le<std::uint64_t>(static_cast<std::uint64_t>(cmd.issued_at_us));
  w.u8(static_cast<std::uint8_t>(cmd.action));
  w.f64(cmd.payload_x);
  w.f64(cmd.payload_y);
}

InputCommand read_input(Reader& r) {
  InputCommand cmd;
  cmd.client_id = r.le<std::uint32_t>();
  cmd.input_seq = r.le<std::uint32_t>();
  cmd.issued_at_us = static_cast<std::int64_t>(r.le<std::uint64_t>());
  const std::uint8_t tag = r.u8();
  if (tag > static_cast<std::uint8_t>(ActionKind::kIdle)) {
    throw DecodeError("unknown action tag " + std::to_string(tag));
  }
  cmd.action = static_cast<ActionKind>(tag);
  cmd.payload_x = r.f64();
  cmd.payload_y = r.f64();
  return cmd;
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap) {
  if (snap.entries.size() > 0xffff) {
    throw std::invalid_argument("snapshot entry count exceeds u16");
  }
  std::vector<std::uint8_t> out;
  out.reserve(snapshot_wire_size(snap.entries.size()));
  Writer w(out);
  w.u8(kProtocolVersion);
  w.le<std::uint64_t>(snap.tick);
  w.le<std::uint64_t>(static_cast<std::uint64_t>(snap.server_time_us));
  w.le<std::uint16_t>(static_cast<std::uint16_t>(snap.entries.size()));
  for (const EntityState& e : snap.entries) {
    write_entry(w, e);
  }
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint8_t version = r.u8();
  if (version != kProtocolVersion) {
    throw DecodeError("snapshot version mismatch: got " +
                      std::to_string(version));
  }
  Snapshot snap;
  snap.tick = r.le<std::uint64_t>();
  snap.server_time_us = static_cast<sim::TimeUs>(r.le<std::uint64_t>());
  const std::uint16_t count = r.le<std::uint16_t>();
  snap.entries.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    snap.entries.push_back(read_entry(r));
  }
  r.expect_end();
  return snap;
}

std::vector<std::uint8_t> encode_input(const InputCommand& cmd) {
  std::vector<std::uint8_t> out;
  out.reserve(kInputCommandBytes);
  Writer w(out);
  write_input(w, cmd);
  return out;
}

InputCommand decode_input(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  InputCommand cmd = read_input(r);
  r.expect_end();
  return cmd;
}

std::vector<std::uint8_t> encode_input_batch(
    const std::vector<InputCommand>& cmds) {
  if (cmds.size() > kInputBatchMaxCount) {
    throw std::invalid_argument("input batch exceeds redundancy window");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kInputBatchHeaderBytes + cmds.size() * kInputCommandBytes);
  Writer w(out);
  w.u8(kProtocolVersion);
  w.u8(static_cast<std::uint8_t>(cmds.size()));
  for (const InputCommand& cmd : cmds) {
    write_input(w, cmd);
  }
  return out;
}

std::vector<InputCommand> decode_input_batch(
    std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint8_t version = r.u8();
  if (version != kProtocolVersion) {
    throw DecodeError("input batch version mismatch: got " +
                      std::to_string(version));
  }
  const std::uint8_t count = r.u8();
  if (count > kInputBatchMaxCount) {
    throw DecodeError("input batch count exceeds redundancy window");
  }
  std::vector<InputCommand> cmds;
  cmds.reserve(count);
  for (std::uint8_t i = 0; i < count; ++i) {
    cmds.push_back(read_input(r));
  }
  r.expect_end();
  return cmds;
}

}  // namespace netsync::proto
