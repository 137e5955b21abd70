#include "netsync/harness/netcode_sim.hpp"

#include <string>

namespace netsync::harness {

namespace {
constexpr std::size_t kSyncMessageBytes = 32;
constexpr sim::NodeId kWireNode = 1;

std::string stream_name(const char* role, std::uint32_t client_id) {
  return std::string(role) + "." + std::to_string(client_id);
}
}  // namespace

NetcodeSim::NetcodeSim(const NetcodeSpec& spec, std::uint64_t seed)
    : spec_(spec), seed_(seed) {
  server_ = std::make_unique<gn::Server>(sim_, spec_.server, &collector_);
  for (const ClientSpec& cs : spec_.clients) {
    server_->add_client(cs.cfg.client_id, cs.cfg.spawn,
                        cs.cfg.render_delay_us);
  }
  for (const gn::BotSpec& b : spec_.bots) {
    server_->add_bot(b);
  }
  for (const ClientSpec& cs : spec_.clients) {
    wire_client(cs);
  }
}

void NetcodeSim::wire_client(const ClientSpec& cs) {
  const std::uint32_t cid = cs.cfg.client_id;

  Channel ch;
  ch.up = std::make_unique<sim::Link>(
      cs.uplink, sim::RngStream(seed_, stream_name("link.up", cid)));
  ch.down = std::make_unique<sim::Link>(
      cs.downlink, sim::RngStream(seed_, stream_name("link.down", cid)));
  ch.sync_up = std::make_unique<sim::Link>(
      cs.uplink, sim::RngStream(seed_, stream_name("link.sync.up", cid)));
  ch.sync_down = std::make_unique<sim::Link>(
      cs.downlink, sim::RngStream(seed_, stream_name("link.sync.down", cid)));
  channels_.emplace(cid, std::move(ch));

  auto client = std::make_unique<gn::Client>(
      sim_, cs.cfg, sim::RngStream(seed_, stream_name("client.walk", cid)),
      &collector_);

  // Uplink: client input batches -> server.
  client->set_input_sink([this, cid](std::vector<std::uint8_t> bytes) {
    sim::Link& link = *channels_.at(cid).up;
    const auto delivery = link.send(sim_.now(), bytes.size());
    if (!delivery.has_value()) {
      collector_.record({sim_.now(), "input_lost", cid, 0, 0, 0.0,
                         static_cast<double>(bytes.size())});
      return;
    }
    sim_.schedule_at(
        *delivery, kWireNode, [this, cid, bytes = std::move(bytes)] {
          const auto cmds = proto::decode_input_batch(bytes);
          collector_.record({sim_.now(), "input_recv", cid,
                             cmds.empty() ? 0 : cmds.back().input_seq,
                             cmds.empty() ? 0 : cmds.back().issued_at_us,
                             static_cast<double>(cmds.size()),
                             static_cast<double>(bytes.size())});
          server_->on_input_bytes(cid, bytes);
        });
  });

  clients_.emplace(cid, std::move(client));
}

void NetcodeSim::run(sim::TimeUs duration_us) {
  if (ran_) {
    throw std::logic_error("NetcodeSim::run may only be called once");
  }
  ran_ = true;

  // Downlink: snapshots fan out per client through that client's link.
  server_->set_snapshot_sink(
      [this](std::uint32_t cid, std::vector<std::uint8_t> bytes) {
        const proto::Snapshot snap = proto::decode_snapshot(bytes);
        const sim::TimeUs send_time = sim_.now();
        collector_.record({send_time, "snap_send", cid, snap.tick,
                           snap.server_time_us, 0.0,
                           static_cast<double>(bytes.size())});
        sim::Link& link = *channels_.at(cid).down;
        const auto delivery = link.send(send_time, bytes.size());
        if (!delivery.has_value()) {
          collector_.record({send_time, "snap_lost", cid, snap.tick,
                             snap.server_time_us, 0.0,
                             static_cast<double>(bytes.size())});
          return;
        }
        sim_.schedule_at(*delivery, kWireNode,
                         [this, cid, send_time, bytes = std::move(bytes)] {
                           const proto::Snapshot s =
                               proto::decode_snapshot(bytes);
                           collector_.record(
                               {sim_.now(), "snap_recv", cid, s.tick,
                                s.server_time_us,
                                static_cast<double>(send_time),
                                static_cast<double>(bytes.size())});
                           clients_.at(cid)->on_snapshot_bytes(bytes);
                         });
      });

  server_->start(0);
  for (auto& [cid, client] : clients_) {
    client->start(0);
  }
  if (spec_.sync.has_value()) {
    for (const ClientSpec& cs : spec_.clients) {
      const std::uint32_t cid = cs.cfg.client_id;
      sim_.schedule_at(spec_.sync->start_us, kWireNode,
                       [this, cid] { schedule_sync_round(cid, spec_.sync->count); });
    }
  }
  sim_.run_until(duration_us);
}

void NetcodeSim::schedule_sync_round(std::uint32_t client_id, int remaining) {
  if (remaining <= 0) {
    return;
  }
  start_sync_exchange(client_id);
  sim_.schedule_in(spec_.sync->period_us, kWireNode,
                   [this, client_id, remaining] {
                     schedule_sync_round(client_id, remaining - 1);
                   });
}

void NetcodeSim::start_sync_exchange(std::uint32_t client_id) {
  // Two-way exchange over the dedicated control-plane links: the server
  // (grandmaster) stamps t1/t4 on its clock, the client t2/t3 on its own.
  Channel& ch = channels_.at(client_id);
  const sim::TimeUs t1 = sim_.now();
  const auto d_fwd = ch.sync_down->send(t1, kSyncMessageBytes);
  if (!d_fwd.has_value()) {
    return;  // lost on the forward path; this round yields no estimate
  }
  sim_.schedule_at(*d_fwd, kWireNode, [this, client_id, t1] {
    gn::Client& cl = *clients_.at(client_id);
    const sim::TimeUs t2 = cl.local_now();
    const sim::TimeUs t3 = t2;  // immediate turnaround
    Channel& ch2 = channels_.at(client_id);
    const auto d_rev = ch2.sync_up->send(sim_.now(), kSyncMessageBytes);
    if (!d_rev.has_value()) {
      return;
    }
    sim_.schedule_at(*d_rev, kWireNode, [this, client_id, t1, t2, t3] {
      const sim::TimeUs t4 = sim_.now();
      server_->record_sync_exchange(client_id, {t1, t2, t3, t4});
    });
  });
}

}  // namespace netsync::harness
