#include "netsync/gn/client.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace netsync::gn {

namespace {
constexpr sim::NodeId kClientNodeBase = 1000;
}

void validate(const ClientConfig& cfg) {
  if (cfg.input_period_us <= 0) {
    throw std::invalid_argument("input_period must be > 0");
  }
  if (cfg.input_phase_us < 0) {
    throw std::invalid_argument("input_phase must be >= 0");
  }
  if (cfg.input_dt_s <= 0.0) {
    throw std::invalid_argument("input_dt must be > 0");
  }
  if (cfg.render_delay_us < 0 || cfg.extrapolation_cap_us < 0 ||
      cfg.render_period_us < 0) {
    throw std::invalid_argument("render delays must be >= 0");
  }
  if (cfg.redundancy_window < 1 ||
      cfg.redundancy_window > proto::kInputBatchMaxCount) {
    throw std::invalid_argument("redundancy_window out of range");
  }
  if (cfg.workload.kind == Workload::Kind::kScriptedFire &&
      cfg.workload.fire_period_us <= 0) {
    throw std::invalid_argument("scripted fire needs fire_period > 0");
  }
}

Client::Client(sim::Simulator& sim, ClientConfig cfg, sim::RngStream walk_rng,
               metrics::Collector* collector)
    : sim_(sim),
      cfg_(std::move(cfg)),
      walk_rng_(std::move(walk_rng)),
      collector_(collector) {
  validate(cfg_);
  predicted_.entity_id = cfg_.client_id;
  predicted_.position = cfg_.spawn;
  next_fire_us_ = cfg_.workload.fire_start_us;
}

void Client::start(sim::TimeUs start_us) {
  sim_.schedule_at(start_us + cfg_.input_phase_us,
                   kClientNodeBase + cfg_.client_id, [this] { issue_slot(); });
  if (cfg_.render_period_us > 0) {
    sim_.schedule_at(start_us + cfg_.render_period_us,
                     kClientNodeBase + cfg_.client_id,
                     [this] { render_slot(); });
  }
}

proto::InputCommand Client::make_command() {
  proto::InputCommand cmd;
  cmd.client_id = cfg_.client_id;
  cmd.input_seq = next_seq_++;
  cmd.issued_at_us = local_now();
  cmd.action = proto::ActionKind::kIdle;
  switch (cfg_.workload.kind) {
    case Workload::Kind::kIdle:
      break;
    case Workload::Kind::kRandomWalk: {
      const double angle = walk_rng_.uniform(0.0, 2.0 * std::numbers::pi);
      cmd.action = proto::ActionKind::kMove;
      cmd.payload_x = std::cos(angle);
      cmd.payload_y = std::sin(angle);
      break;
    }
    case Workload::Kind::kScriptedFire: {
      if (sim_.now() >= next_fire_us_) {
        // Aim exactly where the target is rendered right now.
        const auto aim = render_remote(cfg_.workload.fire_target_entity);
        if (aim.has_value()) {
          cmd.action = proto::ActionKind::kFire;
          cmd.payload_x = aim->position.x;
          cmd.payload_y = aim->position.y;
          next_fire_us_ += cfg_.workload.fire_period_us;
        }
      }
      break;
    }
  }
  return cmd;
}

void Client::issue_slot() {
  const bool stopped =
      cfg_.input_stop_us > 0 && sim_.now() >= cfg_.input_stop_us;
  if (!stopped) {
    const proto::InputCommand cmd = make_command();
    proto::apply_input(predicted_, cmd, cfg_.input_dt_s, cfg_.motion);
    pending_.push_back(cmd);
  }
  if (!pending_.empty()) {
    send_window();
  }
  // After the stop time the slot keeps firing only as a re-send
  // heartbeat; once everything is acked it winds down.
  if (!stopped || !pending_.empty()) {
    sim_.schedule_in(cfg_.input_period_us, kClientNodeBase + cfg_.client_id,
                     [this] { issue_slot(); });
  }
}

void Client::send_window() {
  if (!input_sink_) {
    return;
  }
  const std::size_t n = std::min(pending_.size(), cfg_.redundancy_window);
  std::vector<proto::InputCommand> window(pending_.end() - n, pending_.end());
  std::vector<std::uint8_t> bytes = proto::encode_input_batch(window);
  if (collector_ != nullptr) {
    collector_->record({sim_.now(), "input_send", cfg_.client_id,
                        window.back().input_seq, window.back().issued_at_us,
                        static_cast<double>(n),
                        static_cast<double>(bytes.size())});
  }
  input_sink_(std::move(bytes));
}

void Client::on_snapshot_bytes(const std::vector<std::uint8_t>& bytes) {
  const proto::Snapshot snap = proto::decode_snapshot(bytes);
  ++snapshots_received_;
  if (snap.server_time_us < newest_snapshot_time_) {
    ++out_of_order_;
  }
  newest_snapshot_time_ = std::max(newest_snapshot_time_, snap.server_time_us);

  const proto::EntityState* own = nullptr;
  for (const proto::EntityState& e : snap.entries) {
    if (e.entity_id == cfg_.client_id) {
      own = &e;
      continue;
    }
    auto [it, inserted] = buffers_.try_emplace(
        e.entity_id, cfg_.render_delay_us, cfg_.extrapolation_cap_us);
    it->second.insert(snap.server_time_us, e);
    // Keep roughly two render windows of history.
    it->second.prune_before(newest_snapshot_time_ - 2 * cfg_.render_delay_us);
  }
  if (own != nullptr && own->last_input_seq >= last_acked_) {
    reconcile(*own);
  }
}

void Client::reconcile(const proto::EntityState& authoritative) {
  last_acked_ = authoritative.last_input_seq;
  while (!pending_.empty() && pending_.front().input_seq <= last_acked_) {
    pending_.pop_front();
  }
  proto::EntityState replayed = authoritative;
  for (const proto::InputCommand& cmd : pending_) {
    proto::apply_input(replayed, cmd, cfg_.input_dt_s, cfg_.motion);
  }
  const double correction = proto::distance(predicted_.position,
                                            replayed.position);
  corrections_.push_back(correction);
  predicted_ = replayed;
  if (collector_ != nullptr) {
    collector_->record({sim_.now(), "reconcile", cfg_.client_id, last_acked_, 0,
                        correction, 0.0});
  }
}

double Client::max_correction() const {
  double m = 0.0;
  for (double c : corrections_) {
    m = std::max(m, c);
  }
  return m;
}

std::optional<proto::EntityState> Client::sample_remote(
    std::uint32_t entity_id, sim::TimeUs render_time_us) const {
  const auto it = buffers_.find(entity_id);
  if (it == buffers_.end()) {
    return std::nullopt;
  }
  return it->second.sample(render_time_us);
}

std::optional<proto::EntityState> Client::render_remote(
    std::uint32_t entity_id) const {
  return sample_remote(entity_id, local_now() - cfg_.render_delay_us);
}

void Client::render_slot() {
  const sim::TimeUs render_time = local_now() - cfg_.render_delay_us;
  for (const auto& [eid, buf] : buffers_) {
    const auto st = buf.sample(render_time);
    if (st.has_value() && collector_ != nullptr) {
      collector_->record({sim_.now(), "render", cfg_.client_id, eid,
                          render_time, st->position.x, st->position.y});
    }
  }
  sim_.schedule_in(cfg_.render_period_us, kClientNodeBase + cfg_.client_id,
                   [this] { render_slot(); });
}

}  // namespace netsync::gn
