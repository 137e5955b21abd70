#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "netsync/gn/interp.hpp"
#include "netsync/metrics/collector.hpp"
#include "netsync/proto/kinematics.hpp"
#include "netsync/proto/wire.hpp"
#include "netsync/sim/event_queue.hpp"
#include "netsync/sim/rng.hpp"

namespace netsync::gn {

struct Workload {
  enum class Kind { kIdle, kRandomWalk, kScriptedFire };
  Kind kind = Kind::kIdle;
  // kScriptedFire: aim at the target's rendered position every
  // fire_period, starting at the first input slot at/after fire_start.
  sim::TimeUs fire_start_us = 0;
  sim::TimeUs fire_period_us = 0;
  std::uint32_t fire_target_entity = 0;
};

struct ClientConfig {
  std::uint32_t client_id = 1;
  proto::Vec2 spawn;  // must match the server-side spawn
  sim::TimeUs input_period_us = 50'000;
  sim::TimeUs input_phase_us = 0;
  double input_dt_s = 0.05;  // shared with the server (prediction contract)
  proto::MotionParams motion;
  sim::TimeUs render_delay_us = 100'000;
  sim::TimeUs extrapolation_cap_us = 0;
  sim::TimeUs render_period_us = 0;  // 0 = no periodic render sampling
  sim::TimeUs clock_offset_us = 0;   // local clock = sim time + offset
  // Stop issuing new inputs at this sim time (0 = never). While inputs
  // remain unacked the client keeps re-sending them at the input cadence
  // so the final state converges under loss.
  sim::TimeUs input_stop_us = 0;
  std::size_t redundancy_window = 32;
  Workload workload;
};

void validate(const ClientConfig& cfg);

/// One predicted+interpolated client. Outbound input batches leave
/// through a byte sink; inbound snapshots arrive via on_snapshot_bytes.
class Client {
 public:
  Client(sim::Simulator& sim, ClientConfig cfg, sim::RngStream walk_rng,
         metrics::Collector* collector = nullptr);

  using InputSink = std::function<void(std::vector<std::uint8_t>)>;
  void set_input_sink(InputSink sink) { input_sink_ = std::move(sink); }

  void start(sim::TimeUs start_us);
  void on_snapshot_bytes(const std::vector<std::uint8_t>& bytes);

  sim::TimeUs local_now() const { return sim_.now() + cfg_.clock_offset_us; }

  const proto::EntityState& predicted() const { return predicted_; }
  std::uint32_t last_acked_seq() const { return last_acked_; }
  std::uint32_t last_issued_seq() const { return next_seq_ - 1; }
  std::size_t pending_count() const { return pending_.size(); }
  std::uint64_t snapshots_received() const { return snapshots_received_; }
  std::uint64_t out_of_order_count() const { return out_of_order_; }
  const std::vector<double>& corrections() const { return corrections_; }
  double max_correction() const;

  // Rendered remote-entity state at an arbitrary render time (nullopt
  // until that entity has appeared in a snapshot).
  std::optional<proto::EntityState> sample_remote(std::uint32_t entity_id,
                                                  sim::TimeUs render_time_us) const;
  // Convenience: sample at local_now - render_delay.
  std::optional<proto::EntityState> render_remote(std::uint32_t entity_id) const;

  const std::map<std::uint32_t, InterpBuffer>& buffers() const {
    return buffers_;
  }

 private:
  void issue_slot();
  proto::InputCommand make_command();
  void send_window();
  void reconcile(const proto::EntityState& authoritative);
  void render_slot();

  sim::Simulator& sim_;
  ClientConfig cfg_;
  sim::RngStream walk_rng_;
  metrics::Collector* collector_;
  InputSink input_sink_;

  proto::EntityState predicted_;
  std::deque<proto::InputCommand> pending_;
  std::uint32_t next_seq_ = 1;
  std::uint32_t last_acked_ = 0;
  std::map<std::uint32_t, InterpBuffer> buffers_;  // remote entities
  sim::TimeUs newest_snapshot_time_ = -1;
  sim::TimeUs next_fire_us_ = 0;
  std::uint64_t snapshots_received_ = 0;
  std::uint64_t out_of_order_ = 0;
  std::vector<double> corrections_;
};

}  // namespace netsync::gn
