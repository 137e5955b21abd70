#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netsync/dtsched/episode.hpp"
#include "netsync/gn/client.hpp"
#include "netsync/gn/server.hpp"
#include "netsync/metrics/timing.hpp"
#include "netsync/sim/link.hpp"

#include "json.hpp"

namespace netsync::harness {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ClientSpec {
  gn::ClientConfig cfg;
  sim::LinkModel uplink;
  sim::LinkModel downlink;
};

struct SyncSpec {
  sim::TimeUs start_us = 100'000;
  sim::TimeUs period_us = 100'000;
  int count = 5;
};

struct NetcodeSpec {
  gn::ServerConfig server;
  std::vector<gn::BotSpec> bots;
  std::vector<ClientSpec> clients;
  std::optional<SyncSpec> sync;
};

struct Scenario {
  std::string name;
  std::vector<std::uint64_t> seeds;
  sim::TimeUs duration_us = 10'000'000;
  metrics::Preset preset = metrics::Preset::kNone;
  std::optional<NetcodeSpec> netcode;
  std::optional<dtsched::DtScenario> dt;
};

// Strict parse: unknown keys are rejected and every error names the
// offending field path. Defaults are documented in the README schema.
Scenario parse_scenario(const nlohmann::json& j, const std::string& name_hint);

// Reads, parses, validates. Throws ScenarioError with file/line context
// on malformed JSON and field paths on schema violations.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace netsync::harness
