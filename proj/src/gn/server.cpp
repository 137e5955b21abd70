#include "netsync/gn/server.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netsync::gn {

namespace {
constexpr sim::NodeId kServerNode = 0;
}

void validate(const ServerConfig& cfg) {
  if (cfg.tick_period_us <= 0) {
    throw std::invalid_argument("tick_period must be > 0");
  }
  if (cfg.gather.kind == GatherPolicy::Kind::kDeadline &&
      cfg.gather.deadline_us < 0) {
    throw std::invalid_argument("gather deadline must be >= 0");
  }
  if (cfg.history_horizon_us <= 0) {
    throw std::invalid_argument("history_horizon must be > 0");
  }
  if (cfg.input_dt_s <= 0.0) {
    throw std::invalid_argument("input_dt must be > 0");
  }
  if (cfg.hit_radius <= 0.0) {
    throw std::invalid_argument("hit_radius must be > 0");
  }
  if (cfg.disconnect_timeout_ticks < 1) {
    throw std::invalid_argument("disconnect_timeout_ticks must be >= 1");
  }
  proto::validate(cfg.priority);
}

proto::EntityState bot_state_at(const BotSpec& spec, sim::TimeUs elapsed_us) {
  proto::EntityState st;
  st.entity_id = spec.entity_id;
  st.position = spec.spawn;
  if (spec.segments.empty() || elapsed_us <= 0) {
    return st;
  }

  sim::TimeUs total = 0;
  for (const auto& seg : spec.segments) {
    total += seg.duration_us;
  }
  if (total == 0) {
    return st;
  }

  sim::TimeUs t = elapsed_us;
  if (spec.loop) {
    const sim::TimeUs cycles = t / total;
    if (cycles > 0) {
      proto::Vec2 per_cycle;
      for (const auto& seg : spec.segments) {
        per_cycle = per_cycle +
                    seg.velocity * (static_cast<double>(seg.duration_us) * 1e-6);
      }
      st.position = st.position + per_cycle * static_cast<double>(cycles);
      t -= cycles * total;
    }
  } else if (t >= total) {
    // Past the end of the script the bot holds its final position.
    for (const auto& seg : spec.segments) {
      st.position =
          st.position + seg.velocity * (static_cast<double>(seg.duration_us) * 1e-6);
    }
    return st;
  }

  // 0 <= t < total; velocity is right-continuous at segment boundaries.
  for (const auto& seg : spec.segments) {
    if (t < seg.duration_us) {
      st.position =
          st.position + seg.velocity * (static_cast<double>(t) * 1e-6);
      st.velocity = seg.velocity;
      return st;
    }
    st.position = st.position +
                  seg.velocity * (static_cast<double>(seg.duration_us) * 1e-6);
    t -= seg.duration_us;
  }
  return st;
}

HitResult hit_test(const std::vector<proto::EntityState>& world,
                   std::uint32_t shooter_entity, proto::Vec2 aim,
                   double radius) {
  HitResult out;
  bool first = true;
  for (const proto::EntityState& e : world) {
    if (e.entity_id == shooter_entity) {
      continue;
    }
    const double d = proto::distance(aim, e.position);
    if (first || d < out.min_distance) {
      out.min_distance = d;
      out.hit_entity = e.entity_id;
      first = false;
    }
  }
  if (first) {
    return out;  // no candidate targets
  }
  out.hit = out.min_distance <= radius;
  if (!out.hit) {
    out.hit_entity = 0;
  }
  return out;
}

HitResult validate_hit(const WorldHistory& history,
                       std::uint32_t shooter_entity, proto::Vec2 aim,
                       sim::TimeUs view_time_us, double radius) {
  const RewindResult rewound = history.rewind(view_time_us);
  HitResult out = hit_test(rewound.entities, shooter_entity, aim, radius);
  out.too_old = rewound.too_old;
  return out;
}

Server::Server(sim::Simulator& sim, ServerConfig cfg,
               metrics::Collector* collector)
    : sim_(sim),
      cfg_(cfg),
      collector_(collector),
      history_(cfg.history_horizon_us) {
  validate(cfg_);
}

void Server::add_client(std::uint32_t client_id, proto::Vec2 spawn,
                        sim::TimeUs render_delay_hint_us) {
  if (started_) {
    throw std::logic_error("clients must be added before start");
  }
  if (sessions_.count(client_id) || world_.count(client_id)) {
    throw std::invalid_argument("duplicate client/entity id");
  }
  ClientSession s;
  s.entity_id = client_id;  // entity id doubles as the client id
  s.render_delay_hint_us = render_delay_hint_us >= 0
                               ? render_delay_hint_us
                               : cfg_.render_delay_hint_us;
  sessions_.emplace(client_id, std::move(s));
  proto::EntityState st;
  st.entity_id = client_id;
  st.position = spawn;
  world_.emplace(client_id, st);
}

void Server::add_bot(BotSpec spec) {
  if (started_) {
    throw std::logic_error("bots must be added before start");
  }
  if (world_.count(spec.entity_id)) {
    throw std::invalid_argument("duplicate entity id");
  }
  proto::EntityState st = bot_state_at(spec, 0);
  world_.emplace(spec.entity_id, st);
  bots_.push_back(std::move(spec));
}

void Server::start(sim::TimeUs start_us) {
  if (started_) {
    throw std::logic_error("server already started");
  }
  started_ = true;
  start_us_ = start_us;
  HistoryFrame frame;
  frame.tick = 0;
  frame.server_time_us = start_us;
  frame.entities = world_snapshot();
  history_.push(std::move(frame));
  schedule_tick_boundary(next_tick_);
}

std::vector<proto::EntityState> Server::world_snapshot() const {
  std::vector<proto::EntityState> out;
  out.reserve(world_.size());
  for (const auto& [id, st] : world_) {
    out.push_back(st);
  }
  return out;
}

std::optional<proto::EntityState> Server::entity(
    std::uint32_t entity_id) const {
  if (auto it = world_.find(entity_id); it != world_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::uint32_t Server::last_applied_seq(std::uint32_t client_id) const {
  return sessions_.at(client_id).last_applied_seq;
}

bool Server::client_connected(std::uint32_t client_id) const {
  return sessions_.at(client_id).connected;
}

std::optional<double> Server::offset_estimate_us(
    std::uint32_t client_id) const {
  return sessions_.at(client_id).offset_est.median();
}

std::optional<double> Server::path_delay_estimate_us(
    std::uint32_t client_id) const {
  return sessions_.at(client_id).delay_est.median();
}

void Server::on_input_bytes(std::uint32_t client_id,
                            const std::vector<std::uint8_t>& bytes) {
  auto it = sessions_.find(client_id);
  if (it == sessions_.end() || !it->second.connected) {
    return;  // unknown or disconnected sender: drop silently
  }
  ClientSession& s = it->second;
  const std::vector<proto::InputCommand> cmds =
      proto::decode_input_batch(bytes);
  for (const proto::InputCommand& cmd : cmds) {
    if (cmd.client_id != client_id) {
      continue;  // mislabeled command
    }
    if (cmd.input_seq <= s.last_applied_seq || s.pending.count(cmd.input_seq)) {
      ++duplicate_inputs_;  // redundancy window re-send; expected under loss
      continue;
    }
    s.pending.emplace(cmd.input_seq, PendingInput{cmd, sim_.now()});
  }
  if (waiting_ && all_clients_ready()) {
    process_tick(next_tick_);
  }
}

void Server::record_sync_exchange(std::uint32_t client_id,
                                  const metrics::SyncExchange& x) {
  ClientSession& s = sessions_.at(client_id);
  s.offset_est.add(metrics::estimate_offset(x));
  s.delay_est.add(metrics::estimate_path_delay(x));
  if (collector_ != nullptr) {
    collector_->record({sim_.now(), "sync", client_id, 0, x.t1,
                        *s.offset_est.median(), *s.delay_est.median()});
  }
}

void Server::schedule_tick_boundary(std::uint64_t tick) {
  if (cfg_.max_ticks != 0 && tick > cfg_.max_ticks) {
    return;
  }
  const sim::TimeUs nominal = nominal_time(tick);
  sim::TimeUs fire_at = std::max(nominal, sim_.now());
  if (cfg_.gather.kind == GatherPolicy::Kind::kDeadline) {
    fire_at = std::max(nominal + cfg_.gather.deadline_us, sim_.now());
  }
  sim_.schedule_at(fire_at, kServerNode,
                   [this, tick] { on_tick_boundary(tick); });
}

void Server::on_tick_boundary(std::uint64_t tick) {
  if (tick != next_tick_) {
    return;  // stale boundary (tick already processed via wait_all wake-up)
  }
  if (cfg_.gather.kind == GatherPolicy::Kind::kDeadline) {
    process_tick(tick);
    return;
  }
  if (all_clients_ready()) {
    process_tick(tick);
    return;
  }
  waiting_ = true;
  const sim::TimeUs timeout =
      sim_.now() +
      static_cast<sim::TimeUs>(cfg_.disconnect_timeout_ticks) *
          cfg_.tick_period_us;
  sim_.schedule_at(timeout, kServerNode, [this, tick] { on_wait_timeout(tick); });
}

void Server::on_wait_timeout(std::uint64_t tick) {
  if (!waiting_ || tick != next_tick_) {
    return;  // the wait already resolved
  }
  for (auto& [cid, s] : sessions_) {
    if (!s.connected) {
      continue;
    }
    const bool ready = s.pending.count(s.last_applied_seq + 1) > 0;
    if (!ready) {
      s.connected = false;
      if (collector_ != nullptr) {
        collector_->record({sim_.now(), "disconnect", cid, tick, 0, 0.0, 0.0});
      }
    }
  }
  process_tick(tick);
}

bool Server::all_clients_ready() const {
  for (const auto& [cid, s] : sessions_) {
    if (!s.connected) {
      continue;
    }
    if (s.pending.count(s.last_applied_seq + 1) == 0) {
      return false;
    }
  }
  return true;
}

void Server::advance_bots(sim::TimeUs to_us) {
  for (const BotSpec& spec : bots_) {
    world_[spec.entity_id] = bot_state_at(spec, to_us - start_us_);
  }
}

void Server::process_tick(std::uint64_t tick) {
  waiting_ = false;
  const sim::TimeUs nominal = nominal_time(tick);
  const sim::TimeUs now = sim_.now();

  advance_bots(nominal);

  // Inputs apply in (client_id, input_seq) order; only consecutive
  // sequences run (gaps wait for the redundancy window to fill them).
  int applied = 0;
  const bool deadline_mode = cfg_.gather.kind == GatherPolicy::Kind::kDeadline;
  const sim::TimeUs cutoff =
      deadline_mode ? nominal + cfg_.gather.deadline_us : now;
  for (auto& [cid, s] : sessions_) {
    if (!s.connected) {
      continue;
    }
    proto::EntityState& st = world_.at(s.entity_id);
    while (true) {
      auto it = s.pending.find(s.last_applied_seq + 1);
      if (it == s.pending.end() || it->second.arrival_us > cutoff) {
        break;
      }
      const PendingInput pi = it->second;
      s.pending.erase(it);
      if (pi.cmd.action == proto::ActionKind::kFire) {
        pending_fires_.push_back({cid, pi.cmd, pi.arrival_us});
      }
      apply_input(st, pi.cmd, cfg_.input_dt_s, cfg_.motion);
      s.last_applied_seq = pi.cmd.input_seq;
      ++applied;
    }
  }

  HistoryFrame frame;
  frame.tick = tick;
  frame.server_time_us = nominal;
  frame.entities = world_snapshot();
  history_.push(std::move(frame));

  for (const FirePending& fp : pending_fires_) {
    resolve_fire(fp.client_id, sessions_.at(fp.client_id),
                 {fp.cmd, fp.arrival_us});
  }
  pending_fires_.clear();

  emit_snapshots(tick);

  tick_records_.push_back({tick, nominal, now, applied});
  if (collector_ != nullptr) {
    collector_->record(
        {now, "tick", 0, tick, nominal, static_cast<double>(applied), 0.0});
  }

  ++ticks_processed_;
  next_tick_ = tick + 1;
  schedule_tick_boundary(next_tick_);
}

void Server::resolve_fire(std::uint32_t client_id, const ClientSession& s,
                          const PendingInput& pi) {
  // What the shooter saw: receive-side estimate of the client's render
  // time, mapped to the server clock. Falls back to zero path delay
  // before any sync exchange completes.
  const double delay_est = s.delay_est.median().value_or(0.0);
  const sim::TimeUs view_time =
      pi.arrival_us - static_cast<sim::TimeUs>(std::llround(delay_est)) -
      s.render_delay_hint_us;
  const proto::Vec2 aim{pi.cmd.payload_x, pi.cmd.payload_y};

  const HitResult comp =
      validate_hit(history_, s.entity_id, aim, view_time, cfg_.hit_radius);
  const HitResult uncomp =
      hit_test(history_.newest().entities, s.entity_id, aim, cfg_.hit_radius);

  FireRecord rec;
  rec.processed_us = sim_.now();
  rec.shooter = client_id;
  rec.view_time_us = view_time;
  rec.compensated_hit = comp.hit;
  rec.uncompensated_hit = uncomp.hit;
  rec.too_old = comp.too_old;
  fire_records_.push_back(rec);
  if (collector_ != nullptr) {
    collector_->record({sim_.now(), "fire", client_id, fire_counter_++,
                        view_time, comp.hit ? 1.0 : 0.0,
                        uncomp.hit ? 1.0 : 0.0});
  }
}

void Server::emit_snapshots(std::uint64_t tick) {
  if (!snapshot_sink_) {
    return;
  }
  const std::vector<proto::EntityState> world = world_snapshot();
  for (auto& [cid, s] : sessions_) {
    if (!s.connected) {
      continue;
    }
    const std::vector<std::uint32_t> ids = proto::prioritize(
        world, s.entity_id, s.last_sent_tick, tick, cfg_.priority);
    proto::Snapshot snap;
    snap.tick = tick;
    snap.server_time_us = nominal_time(tick);
    snap.entries.reserve(ids.size());
    for (std::uint32_t eid : ids) {
      snap.entries.push_back(world_.at(eid));
      s.last_sent_tick[eid] = tick;
    }
    snapshot_sink_(cid, proto::encode_snapshot(snap));
  }
}

}  // namespace netsync::gn
