#pragma once

#include <map>
#include <memory>

#include "netsync/gn/client.hpp"
#include "netsync/gn/server.hpp"
#include "netsync/harness/scenario.hpp"
#include "netsync/metrics/collector.hpp"
#include "netsync/sim/link.hpp"

namespace netsync::harness {

/// One seeded netcode experiment: server, clients, impaired links and a
/// PTP-style sync side channel, all driven by a single event loop.
/// Construct, run(), then inspect components or the collected rows.
class NetcodeSim {
 public:
  NetcodeSim(const NetcodeSpec& spec, std::uint64_t seed);

  void run(sim::TimeUs duration_us);

  sim::Simulator& simulator() { return sim_; }
  gn::Server& server() { return *server_; }
  gn::Client& client(std::uint32_t id) { return *clients_.at(id); }
  const metrics::Collector& collector() const { return collector_; }
  std::uint64_t seed() const { return seed_; }
  const NetcodeSpec& spec() const { return spec_; }

 private:
  struct Channel {
    std::unique_ptr<sim::Link> up;         // client -> server data
    std::unique_ptr<sim::Link> down;       // server -> client data
    std::unique_ptr<sim::Link> sync_up;    // control plane, same models
    std::unique_ptr<sim::Link> sync_down;
  };

  void wire_client(const ClientSpec& cs);
  void schedule_sync_round(std::uint32_t client_id, int remaining);
  void start_sync_exchange(std::uint32_t client_id);

  NetcodeSpec spec_;
  std::uint64_t seed_;
  sim::Simulator sim_;
  metrics::Collector collector_;
  std::unique_ptr<gn::Server> server_;
  std::map<std::uint32_t, std::unique_ptr<gn::Client>> clients_;
  std::map<std::uint32_t, Channel> channels_;
  bool ran_ = false;
};

}  // namespace netsync::harness
