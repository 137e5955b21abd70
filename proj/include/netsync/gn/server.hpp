#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "netsync/gn/history.hpp"
#include "netsync/metrics/collector.hpp"
#include "netsync/metrics/timing.hpp"
#include "netsync/proto/kinematics.hpp"
#include "netsync/proto/priority.hpp"
#include "netsync/proto/wire.hpp"
#include "netsync/sim/event_queue.hpp"

namespace netsync::gn {

struct GatherPolicy {
  enum class Kind { kWaitAll, kDeadline };
  Kind kind = Kind::kWaitAll;
  sim::TimeUs deadline_us = 0;  // only for kDeadline

  static GatherPolicy wait_all() { return {Kind::kWaitAll, 0}; }
  static GatherPolicy deadline(sim::TimeUs d) { return {Kind::kDeadline, d}; }
};

struct ServerConfig {
  sim::TimeUs tick_period_us = 50'000;
  GatherPolicy gather = GatherPolicy::wait_all();
  sim::TimeUs history_horizon_us = 1'000'000;
  proto::PriorityConfig priority;
  proto::MotionParams motion;
  double input_dt_s = 0.05;  // integration step per input, shared with clients
  double hit_radius = 1.0;
  bool lag_compensation = true;
  // Interpolation delay assumed when mapping a fire back to what the
  // shooter saw; must match the clients' render_delay.
  sim::TimeUs render_delay_hint_us = 100'000;
  int disconnect_timeout_ticks = 10;
  std::uint64_t max_ticks = 0;  // 0 = no limit
};

void validate(const ServerConfig& cfg);

/// Server-driven entity following a piecewise-constant velocity script.
/// Segment boundaries should align with tick boundaries so the resulting
/// trajectory is piecewise linear across frames.
struct BotSpec {
  std::uint32_t entity_id = 0;
  proto::Vec2 spawn;
  struct Segment {
    sim::TimeUs duration_us = 0;
    proto::Vec2 velocity;
  };
  std::vector<Segment> segments;
  bool loop = false;
};

// Closed-form bot state at elapsed_us since the bot's start. After the
// script ends (loop = false) the bot holds its final position.
proto::EntityState bot_state_at(const BotSpec& spec, sim::TimeUs elapsed_us);

struct HitResult {
  bool hit = false;
  std::uint32_t hit_entity = 0;
  bool too_old = false;
  double min_distance = 0.0;
};

// Aim-point vs hit-circle test against the rewound world (mechanism 4).
HitResult validate_hit(const WorldHistory& history,
                       std::uint32_t shooter_entity, proto::Vec2 aim,
                       sim::TimeUs view_time_us, double radius);

// Same test against an explicit (current) world: the uncompensated path.
HitResult hit_test(const std::vector<proto::EntityState>& world,
                   std::uint32_t shooter_entity, proto::Vec2 aim,
                   double radius);

struct TickRecord {
  std::uint64_t tick = 0;
  sim::TimeUs nominal_us = 0;
  sim::TimeUs processed_us = 0;
  int inputs_applied = 0;
};

struct FireRecord {
  sim::TimeUs processed_us = 0;
  std::uint32_t shooter = 0;
  sim::TimeUs view_time_us = 0;
  bool compensated_hit = false;
  bool uncompensated_hit = false;
  bool too_old = false;
};

/// Authoritative fixed-tick world. Driven entirely by sim-core events;
/// talks to the outside through byte sinks the harness wires to links.
class Server {
 public:
  Server(sim::Simulator& sim, ServerConfig cfg,
         metrics::Collector* collector = nullptr);

  // render_delay_hint_us < 0 means "use the config default".
  void add_client(std::uint32_t client_id, proto::Vec2 spawn,
                  sim::TimeUs render_delay_hint_us = -1);
  void add_bot(BotSpec spec);

  using SnapshotSink =
      std::function<void(std::uint32_t client_id, std::vector<std::uint8_t>)>;
  void set_snapshot_sink(SnapshotSink sink) { snapshot_sink_ = std::move(sink); }

  // Begins ticking; tick k (k ≥ 1) is nominally at start_us + k·period.
  // An initial history frame is recorded at start_us.
  void start(sim::TimeUs start_us);

  // Entry point for a client->server datagram (one input batch).
  void on_input_bytes(std::uint32_t client_id,
                      const std::vector<std::uint8_t>& bytes);

  // Feed one completed two-way sync exchange for a client; updates that
  // client's offset and path-delay estimates (sliding medians).
  void record_sync_exchange(std::uint32_t client_id,
                            const metrics::SyncExchange& x);

  const std::vector<TickRecord>& tick_records() const { return tick_records_; }
  const std::vector<FireRecord>& fire_records() const { return fire_records_; }
  const WorldHistory& history() const { return history_; }
  std::vector<proto::EntityState> world_snapshot() const;
  std::optional<proto::EntityState> entity(std::uint32_t entity_id) const;
  std::uint64_t ticks_processed() const { return ticks_processed_; }
  std::uint32_t last_applied_seq(std::uint32_t client_id) const;
  bool client_connected(std::uint32_t client_id) const;
  std::optional<double> offset_estimate_us(std::uint32_t client_id) const;
  std::optional<double> path_delay_estimate_us(std::uint32_t client_id) const;
  std::uint64_t duplicate_inputs() const { return duplicate_inputs_; }

 private:
  struct PendingInput {
    proto::InputCommand cmd;
    sim::TimeUs arrival_us = 0;
  };
  struct ClientSession {
    std::uint32_t entity_id = 0;
    sim::TimeUs render_delay_hint_us = 0;
    std::map<std::uint32_t, PendingInput> pending;  // keyed by input_seq
    std::uint32_t last_applied_seq = 0;
    bool connected = true;
    std::unordered_map<std::uint32_t, std::uint64_t> last_sent_tick;
    metrics::SlidingMedian offset_est{5};
    metrics::SlidingMedian delay_est{5};
  };

  sim::TimeUs nominal_time(std::uint64_t tick) const {
    return start_us_ + static_cast<sim::TimeUs>(tick) * cfg_.tick_period_us;
  }
  void schedule_tick_boundary(std::uint64_t tick);
  void on_tick_boundary(std::uint64_t tick);
  void on_wait_timeout(std::uint64_t tick);
  bool all_clients_ready() const;
  void process_tick(std::uint64_t tick);
  void resolve_fire(std::uint32_t client_id, const ClientSession& s,
                    const PendingInput& pi);
  void emit_snapshots(std::uint64_t tick);
  void advance_bots(sim::TimeUs to_us);

  sim::Simulator& sim_;
  ServerConfig cfg_;
  metrics::Collector* collector_;
  SnapshotSink snapshot_sink_;

  sim::TimeUs start_us_ = 0;
  bool started_ = false;
  std::map<std::uint32_t, ClientSession> sessions_;  // keyed by client_id
  std::map<std::uint32_t, proto::EntityState> world_;  // keyed by entity_id
  std::vector<BotSpec> bots_;
  WorldHistory history_;
  std::uint64_t next_tick_ = 1;
  std::uint64_t ticks_processed_ = 0;
  bool waiting_ = false;  // wait_all: boundary reached, inputs outstanding
  std::vector<TickRecord> tick_records_;
  std::vector<FireRecord> fire_records_;
  struct FirePending {
    std::uint32_t client_id = 0;
    proto::InputCommand cmd;
    sim::TimeUs arrival_us = 0;
  };
  std::vector<FirePending> pending_fires_;  // resolved after the frame push
  std::uint64_t fire_counter_ = 0;
  std::uint64_t duplicate_inputs_ = 0;
};

}  // namespace netsync::gn
