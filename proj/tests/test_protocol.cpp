#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "netsync/proto/kinematics.hpp"
#include "netsync/proto/priority.hpp"
#include "netsync/proto/wire.hpp"

using namespace netsync;
using proto::ActionKind;
using proto::EntityState;
using proto::InputCommand;
using proto::Snapshot;

namespace {

EntityState make_entity(std::uint32_t id, double px, double py, double vx,
                        double vy, std::uint32_t seq) {
  EntityState e;
  e.entity_id = id;
  e.position = {px, py};
  e.velocity = {vx, vy};
  e.last_input_seq = seq;
  return e;
}

}  // namespace

TEST_CASE("empty snapshot round-trips") {
  Snapshot snap;
  snap.tick = 17;
  snap.server_time_us = 850'000;
  const auto bytes = proto::encode_snapshot(snap);
  CHECK(bytes.size() == proto::snapshot_wire_size(0));
  CHECK(bytes.size() == 19);
  CHECK(proto::decode_snapshot(bytes) == snap);
}

TEST_CASE("snapshot with entities round-trips bit-exactly") {
  Snapshot snap;
  snap.tick = 0xdeadbeef12345678ull;
  snap.server_time_us = 1'234'567;
  snap.entries.push_back(make_entity(1, -3.5, 0.1 + 0.2, 5.0, -0.0, 42));
  snap.entries.push_back(make_entity(50, 1e-300, 1e300, -1.25, 3.0, 0));
  snap.entries.push_back(make_entity(0xffffffffu, 0.0, 0.0, 0.0, 0.0,
                                     0xffffffffu));
  const auto bytes = proto::encode_snapshot(snap);
  CHECK(bytes.size() == 19 + 3 * 40);
  CHECK(proto::decode_snapshot(bytes) == snap);
}

TEST_CASE("input command round-trips and has a fixed wire size") {
  InputCommand cmd;
  cmd.client_id = 9;
  cmd.input_seq = 1'000'000;
  cmd.issued_at_us = 123'456'789;
  cmd.action = ActionKind::kFire;
  cmd.payload_x = -7.75;
  cmd.payload_y = 0.015625;
  const auto bytes = proto::encode_input(cmd);
  CHECK(bytes.size() == proto::kInputCommandBytes);
  CHECK(bytes.size() == 33);
  CHECK(proto::decode_input(bytes) == cmd);
}

TEST_CASE("input batch round-trips") {
  std::vector<InputCommand> cmds(3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    cmds[i].client_id = 2;
    cmds[i].input_seq = 10 + i;
    cmds[i].action = i == 1 ? ActionKind::kMove : ActionKind::kIdle;
    cmds[i].payload_x = 0.5 * i;
  }
  const auto bytes = proto::encode_input_batch(cmds);
  CHECK(bytes.size() == 2 + 3 * 33);
  CHECK(proto::decode_input_batch(bytes) == cmds);

  CHECK(proto::encode_input_batch({}).size() == 2);
  CHECK(proto::decode_input_batch(proto::encode_input_batch({})).empty());
}

TEST_CASE("batch larger than the redundancy window is rejected") {
  std::vector<InputCommand> cmds(proto::kInputBatchMaxCount + 1);
  CHECK_THROWS_AS(proto::encode_input_batch(cmds), std::invalid_argument);
  // A crafted header claiming 65 commands must not decode either.
  const std::vector<std::uint8_t> bytes{proto::kProtocolVersion, 65};
  CHECK_THROWS_AS(proto::decode_input_batch(bytes), proto::DecodeError);
}

TEST_CASE("decode errors") {
  Snapshot snap;
  snap.entries.push_back(make_entity(1, 0, 0, 0, 0, 0));
  auto bytes = proto::encode_snapshot(snap);

  SUBCASE("truncated") {
    bytes.pop_back();
    CHECK_THROWS_AS(proto::decode_snapshot(bytes), proto::DecodeError);
  }
  SUBCASE("version mismatch") {
    bytes[0] = 2;
    CHECK_THROWS_AS(proto::decode_snapshot(bytes), proto::DecodeError);
  }
  SUBCASE("trailing bytes") {
    bytes.push_back(0);
    CHECK_THROWS_AS(proto::decode_snapshot(bytes), proto::DecodeError);
  }
  SUBCASE("bad action tag") {
    InputCommand cmd;
    auto enc = proto::encode_input(cmd);
    enc[4 + 4 + 8] = 3;  // tag sits after client_id, input_seq, issued_at
    CHECK_THROWS_AS(proto::decode_input(enc), proto::DecodeError);
  }
  SUBCASE("empty buffer") {
    CHECK_THROWS_AS(proto::decode_snapshot(std::vector<std::uint8_t>{}),
                    proto::DecodeError);
  }
}

TEST_CASE("wire layout is little-endian") {
  Snapshot snap;
  snap.tick = 0x0102030405060708ull;
  snap.server_time_us = 0;
  const auto bytes = proto::encode_snapshot(snap);
  CHECK(bytes[0] == proto::kProtocolVersion);
  // tick, least significant byte first
  CHECK(bytes[1] == 0x08);
  CHECK(bytes[2] == 0x07);
  CHECK(bytes[8] == 0x01);
  // count = 0
  CHECK(bytes[17] == 0);
  CHECK(bytes[18] == 0);

  InputCommand cmd;
  cmd.client_id = 0xAABBCCDD;
  cmd.payload_x = 1.0;  // IEEE-754: 0x3FF0000000000000
  const auto enc = proto::encode_input(cmd);
  CHECK(enc[0] == 0xDD);
  CHECK(enc[3] == 0xAA);
  CHECK(enc[17 + 7] == 0x3F);
  CHECK(enc[17 + 6] == 0xF0);
  CHECK(enc[17] == 0x00);
}

TEST_CASE("apply_input integrates a move") {
  EntityState st;
  proto::MotionParams mp;  // move_speed 5
  InputCommand cmd;
  cmd.input_seq = 1;
  cmd.action = ActionKind::kMove;
  cmd.payload_x = 1.0;
  cmd.payload_y = 0.0;
  CHECK(proto::apply_input(st, cmd, 0.5, mp));
  CHECK(st.velocity == proto::Vec2{5.0, 0.0});
  CHECK(st.position == proto::Vec2{2.5, 0.0});
  CHECK(st.last_input_seq == 1);
}

TEST_CASE("move directions are normalized") {
  EntityState st;
  proto::MotionParams mp;
  InputCommand cmd;
  cmd.input_seq = 1;
  cmd.action = ActionKind::kMove;
  cmd.payload_x = 3.0;
  cmd.payload_y = 4.0;
  CHECK(proto::apply_input(st, cmd, 0.5, mp));
  CHECK(st.velocity.x == doctest::Approx(3.0));
  CHECK(st.velocity.y == doctest::Approx(4.0));
  CHECK(st.position.x == doctest::Approx(1.5));
  CHECK(st.position.y == doctest::Approx(2.0));

  // A zero direction is a stop, not a NaN.
  InputCommand stop;
  stop.input_seq = 2;
  stop.action = ActionKind::kMove;
  CHECK(proto::apply_input(st, stop, 0.5, mp));
  CHECK(st.velocity == proto::Vec2{});
}

TEST_CASE("idle zeroes velocity and holds position, fire changes nothing") {
  EntityState st;
  st.position = {1.0, 2.0};
  st.velocity = {3.0, 4.0};
  proto::MotionParams mp;

  InputCommand idle;
  idle.input_seq = 1;
  idle.action = ActionKind::kIdle;
  CHECK(proto::apply_input(st, idle, 0.05, mp));
  CHECK(st.position == proto::Vec2{1.0, 2.0});
  CHECK(st.velocity == proto::Vec2{});

  EntityState before = st;
  InputCommand fire;
  fire.input_seq = 2;
  fire.action = ActionKind::kFire;
  fire.payload_x = 99.0;
  CHECK(proto::apply_input(st, fire, 0.05, mp));
  before.last_input_seq = 2;
  CHECK(st == before);
}

TEST_CASE("apply_input rejects non-consecutive sequences") {
  EntityState st;
  proto::MotionParams mp;
  InputCommand cmd;
  cmd.action = ActionKind::kMove;
  cmd.payload_x = 1.0;

  cmd.input_seq = 2;  // gap: expected 1
  CHECK_FALSE(proto::apply_input(st, cmd, 0.05, mp));
  CHECK(st == EntityState{});

  cmd.input_seq = 1;
  CHECK(proto::apply_input(st, cmd, 0.05, mp));
  const EntityState after = st;
  // Replaying the same seq is a no-op refusal.
  CHECK_FALSE(proto::apply_input(st, cmd, 0.05, mp));
  CHECK(st == after);
}

TEST_CASE("replaying a command chain reproduces the state bit-exactly") {
  // The prediction/reconciliation contract: same commands, same dt, same
  // function => identical doubles.
  proto::MotionParams mp;
  std::vector<InputCommand> chain;
  for (std::uint32_t i = 1; i <= 20; ++i) {
    InputCommand c;
    c.input_seq = i;
    c.action = i % 5 == 0 ? ActionKind::kIdle : ActionKind::kMove;
    c.payload_x = 0.3 * i;
    c.payload_y = 1.0 - 0.07 * i;
    chain.push_back(c);
  }
  EntityState a, b;
  for (const auto& c : chain) {
    proto::apply_input(a, c, 0.05, mp);
  }
  for (const auto& c : chain) {
    proto::apply_input(b, c, 0.05, mp);
  }
  CHECK(a == b);
}

TEST_CASE("prioritize always includes the own entity for free") {
  std::vector<EntityState> world;
  for (std::uint32_t id = 1; id <= 10; ++id) {
    world.push_back(make_entity(id, id * 10.0, 0, 0, 0, 0));
  }
  proto::PriorityConfig cfg;
  cfg.budget = 3;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent;
  const auto ids = proto::prioritize(world, 4, last_sent, 10, cfg);
  REQUIRE(ids.size() == 4);  // own + budget
  CHECK(ids[0] == 4);
}

TEST_CASE("never-sent entities outrank everything on staleness") {
  std::vector<EntityState> world = {
      make_entity(1, 0, 0, 0, 0, 0),
      make_entity(2, 1, 0, 0, 0, 0),
      make_entity(3, 2, 0, 0, 0, 0),
  };
  proto::PriorityConfig cfg;
  cfg.budget = 1;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent{{2, 0}, {3, 9}};
  // Entity 2 was sent at tick 0 (staleness 10); a never-sent entity would
  // count 11. Here everything was sent, so 2 wins over 3.
  auto ids = proto::prioritize(world, 1, last_sent, 10, cfg);
  CHECK(ids == std::vector<std::uint32_t>{1, 2});

  last_sent.erase(2);
  ids = proto::prioritize(world, 1, last_sent, 10, cfg);
  CHECK(ids == std::vector<std::uint32_t>{1, 2});  // now never-sent, still first
}

TEST_CASE("relevance favors nearby entities") {
  std::vector<EntityState> world = {
      make_entity(1, 0, 0, 0, 0, 0),
      make_entity(2, 90, 0, 0, 0, 0),
      make_entity(3, 5, 0, 0, 0, 0),
  };
  proto::PriorityConfig cfg;
  cfg.budget = 1;
  cfg.w_staleness = 0.0;
  cfg.w_relevance = 1.0;
  cfg.relevance_radius = 100.0;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent{{2, 5}, {3, 5}};
  const auto ids = proto::prioritize(world, 1, last_sent, 5, cfg);
  CHECK(ids == std::vector<std::uint32_t>{1, 3});
}

TEST_CASE("score ties break toward the lower entity id") {
  std::vector<EntityState> world = {
      make_entity(1, 0, 0, 0, 0, 0),
      make_entity(7, 10, 0, 0, 0, 0),
      make_entity(5, -10, 0, 0, 0, 0),
  };
  proto::PriorityConfig cfg;
  cfg.budget = 1;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent{{5, 3}, {7, 3}};
  const auto ids = proto::prioritize(world, 1, last_sent, 8, cfg);
  CHECK(ids == std::vector<std::uint32_t>{1, 5});
}

TEST_CASE("staleness scheduling starves no entity") {
  std::vector<EntityState> world = {
      make_entity(1, 0, 0, 0, 0, 0),
      make_entity(2, 10, 0, 0, 0, 0),
      make_entity(3, 20, 0, 0, 0, 0),
      make_entity(4, 30, 0, 0, 0, 0),
  };
  proto::PriorityConfig cfg;
  cfg.budget = 1;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent;
  std::unordered_map<std::uint32_t, int> sent_count;
  for (std::uint64_t tick = 1; tick <= 12; ++tick) {
    const auto ids = proto::prioritize(world, 1, last_sent, tick, cfg);
    for (std::uint32_t id : ids) {
      last_sent[id] = tick;
      if (id != 1) {
        ++sent_count[id];
      }
    }
  }
  // Round-robin emerges: 12 ticks / 3 remotes = 4 sends each.
  CHECK(sent_count[2] == 4);
  CHECK(sent_count[3] == 4);
  CHECK(sent_count[4] == 4);
}

TEST_CASE("budget larger than the world sends everything") {
  std::vector<EntityState> world = {
      make_entity(1, 0, 0, 0, 0, 0),
      make_entity(2, 1, 0, 0, 0, 0),
  };
  proto::PriorityConfig cfg;
  cfg.budget = 16;
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent;
  CHECK(proto::prioritize(world, 1, last_sent, 1, cfg).size() == 2);
}

TEST_CASE("prioritize validation") {
  std::vector<EntityState> world = {make_entity(1, 0, 0, 0, 0, 0)};
  std::unordered_map<std::uint32_t, std::uint64_t> last_sent;
  proto::PriorityConfig cfg;
  CHECK_THROWS_AS(proto::prioritize(world, 9, last_sent, 1, cfg),
                  std::invalid_argument);  // own entity absent
  cfg.budget = 0;
  CHECK_THROWS_AS(proto::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.w_staleness = 0.0;
  cfg.w_relevance = 0.0;
  CHECK_THROWS_AS(proto::validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.relevance_radius = 0.0;
  CHECK_THROWS_AS(proto::validate(cfg), std::invalid_argument);
}
