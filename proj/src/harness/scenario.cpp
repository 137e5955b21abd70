#include "netsync/harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace netsync::harness {

namespace {

using nlohmann::json;

sim::TimeUs ms_to_us(double ms) {
  return static_cast<sim::TimeUs>(std::llround(ms * 1e3));
}
sim::TimeUs s_to_us(double s) {
  return static_cast<sim::TimeUs>(std::llround(s * 1e6));
}

/// Tracks which keys were consumed so leftovers can be rejected, and
/// prefixes every complaint with the field path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ScenarioError(path_ + ": expected an object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) {
      throw ScenarioError(path_ + "." + key + ": required field missing");
    }
    return *it;
  }

  template <typename T>
  T req(const std::string& key) {
    return convert<T>(raw(key), path_ + "." + key);
  }

  template <typename T>
  T get(const std::string& key, T def) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) {
      return def;
    }
    return convert<T>(*it, path_ + "." + key);
  }

  Obj child(const std::string& key) { return Obj(raw(key), path_ + "." + key); }

  std::optional<Obj> child_opt(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) {
      return std::nullopt;
    }
    return Obj(j_.at(key), path_ + "." + key);
  }

  // Call after consuming every expected key.
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) {
        throw ScenarioError(path_ + "." + key + ": unknown key");
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) {
        throw ScenarioError(path + ": expected a number");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) {
        throw ScenarioError(path + ": expected a boolean");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) {
        throw ScenarioError(path + ": expected a string");
      }
    } else {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ScenarioError(path + ": expected an integer");
      }
      if (v.is_number_integer() && !v.is_number_unsigned() &&
          v.get<std::int64_t>() < 0 && std::is_unsigned_v<T>) {
        throw ScenarioError(path + ": must be >= 0");
      }
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ScenarioError(path + ": wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

proto::Vec2 parse_vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ScenarioError(path + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

sim::JitterSpec parse_jitter(Obj o) {
  const std::string kind = o.get<std::string>("kind", "none");
  sim::JitterSpec spec;
  if (kind == "none") {
    spec = sim::JitterSpec::none();
  } else if (kind == "uniform") {
    spec = sim::JitterSpec::uniform(o.req<double>("low_ms") * 1e3,
                                    o.req<double>("high_ms") * 1e3);
  } else if (kind == "trunc_normal") {
    spec = sim::JitterSpec::trunc_normal(o.req<double>("mean_ms") * 1e3,
                                         o.req<double>("stddev_ms") * 1e3);
  } else if (kind == "trace") {
    const json& arr = o.raw("values_ms");
    if (!arr.is_array() || arr.empty()) {
      throw ScenarioError(o.path() + ".values_ms: expected a non-empty array");
    }
    std::vector<sim::TimeUs> values;
    for (const auto& v : arr) {
      if (!v.is_number()) {
        throw ScenarioError(o.path() + ".values_ms: expected numbers");
      }
      values.push_back(ms_to_us(v.get<double>()));
    }
    spec = sim::JitterSpec::trace(std::move(values));
  } else {
    throw ScenarioError(o.path() + ".kind: unknown jitter kind '" + kind + "'");
  }
  o.done();
  return spec;
}

sim::LinkModel parse_link(Obj o) {
  sim::LinkModel m;
  m.base_delay_us = ms_to_us(o.get<double>("base_delay_ms", 0.0));
  if (auto j = o.child_opt("jitter")) {
    m.jitter = parse_jitter(*j);
  }
  m.loss_prob = o.get<double>("loss_prob", 0.0);
  m.reorder_allowed = o.get<bool>("reorder_allowed", false);
  if (o.has("bandwidth_bytes_per_s")) {
    m.bandwidth_bytes_per_s = o.req<double>("bandwidth_bytes_per_s");
  }
  const std::string path = o.path();
  o.done();
  try {
    sim::validate(m);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return m;
}

gn::GatherPolicy parse_gather(Obj o) {
  const std::string policy = o.req<std::string>("policy");
  gn::GatherPolicy g;
  if (policy == "wait_all") {
    g = gn::GatherPolicy::wait_all();
  } else if (policy == "deadline") {
    g = gn::GatherPolicy::deadline(ms_to_us(o.req<double>("deadline_ms")));
  } else {
    throw ScenarioError(o.path() + ".policy: unknown gather policy '" + policy +
                        "'");
  }
  o.done();
  return g;
}

proto::PriorityConfig parse_priority(Obj o) {
  proto::PriorityConfig cfg;
  cfg.budget = o.get<std::uint64_t>("budget", std::uint64_t{8});
  cfg.w_staleness = o.get<double>("w_staleness", 1.0);
  cfg.w_relevance = o.get<double>("w_relevance", 0.0);
  cfg.relevance_radius = o.get<double>("relevance_radius", 100.0);
  o.done();
  return cfg;
}

gn::BotSpec parse_bot(Obj o) {
  gn::BotSpec spec;
  spec.entity_id = o.req<std::uint32_t>("entity_id");
  spec.spawn = parse_vec2(o.raw("spawn"), o.path() + ".spawn");
  spec.loop = o.get<bool>("loop", false);
  const json& segs = o.raw("segments");
  if (!segs.is_array() || segs.empty()) {
    throw ScenarioError(o.path() + ".segments: expected a non-empty array");
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = o.path() + ".segments[" + std::to_string(i) + "]";
    Obj so(segs[i], p);
    gn::BotSpec::Segment seg;
    seg.duration_us = s_to_us(so.req<double>("duration_s"));
    seg.velocity = parse_vec2(so.raw("velocity"), p + ".velocity");
    so.done();
    if (seg.duration_us <= 0) {
      throw ScenarioError(p + ".duration_s: must be > 0");
    }
    spec.segments.push_back(seg);
  }
  o.done();
  return spec;
}

gn::Workload parse_workload(Obj o) {
  gn::Workload w;
  const std::string kind = o.get<std::string>("kind", "idle");
  if (kind == "idle") {
    w.kind = gn::Workload::Kind::kIdle;
  } else if (kind == "random_walk") {
    w.kind = gn::Workload::Kind::kRandomWalk;
  } else if (kind == "scripted_fire") {
    w.kind = gn::Workload::Kind::kScriptedFire;
    w.fire_start_us = s_to_us(o.req<double>("fire_start_s"));
    w.fire_period_us = s_to_us(o.req<double>("fire_period_s"));
    w.fire_target_entity = o.req<std::uint32_t>("target");
  } else {
    throw ScenarioError(o.path() + ".kind: unknown workload '" + kind + "'");
  }
  o.done();
  return w;
}

ClientSpec parse_client(Obj o, const proto::MotionParams& motion) {
  ClientSpec spec;
  gn::ClientConfig& c = spec.cfg;
  c.client_id = o.req<std::uint32_t>("client_id");
  c.spawn = parse_vec2(o.raw("spawn"), o.path() + ".spawn");
  c.input_period_us = ms_to_us(o.get<double>("input_period_ms", 50.0));
  c.input_phase_us = ms_to_us(o.get<double>("input_phase_ms", 0.0));
  c.input_dt_s = static_cast<double>(c.input_period_us) * 1e-6;
  c.motion = motion;
  c.render_delay_us = ms_to_us(o.get<double>("render_delay_ms", 100.0));
  c.extrapolation_cap_us = ms_to_us(o.get<double>("extrapolation_cap_ms", 0.0));
  c.render_period_us = ms_to_us(o.get<double>("render_period_ms", 0.0));
  c.clock_offset_us = ms_to_us(o.get<double>("clock_offset_ms", 0.0));
  c.input_stop_us = s_to_us(o.get<double>("input_stop_s", 0.0));
  c.redundancy_window = o.get<std::uint64_t>("redundancy_window",
                                             std::uint64_t{32});
  if (auto w = o.child_opt("workload")) {
    c.workload = parse_workload(*w);
  }
  if (auto l = o.child_opt("uplink")) {
    spec.uplink = parse_link(*l);
  }
  if (auto l = o.child_opt("downlink")) {
    spec.downlink = parse_link(*l);
  }
  const std::string path = o.path();
  o.done();
  try {
    gn::validate(c);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return spec;
}

NetcodeSpec parse_netcode(Obj o) {
  NetcodeSpec spec;
  gn::ServerConfig& s = spec.server;
  s.tick_period_us = ms_to_us(o.get<double>("tick_period_ms", 50.0));
  if (auto g = o.child_opt("gather")) {
    s.gather = parse_gather(*g);
  }
  s.history_horizon_us = ms_to_us(o.get<double>("history_horizon_ms", 1000.0));
  if (auto p = o.child_opt("priority")) {
    s.priority = parse_priority(*p);
  }
  s.motion.move_speed = o.get<double>("move_speed", 5.0);
  s.hit_radius = o.get<double>("hit_radius", 1.0);
  s.lag_compensation = o.get<bool>("lag_compensation", true);
  s.disconnect_timeout_ticks = o.get<int>("disconnect_timeout_ticks", 10);
  s.max_ticks = o.get<std::uint64_t>("max_ticks", std::uint64_t{0});

  if (o.has("bots")) {
    const json& arr = o.raw("bots");
    if (!arr.is_array()) {
      throw ScenarioError(o.path() + ".bots: expected an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spec.bots.push_back(
          parse_bot(Obj(arr[i], o.path() + ".bots[" + std::to_string(i) + "]")));
    }
  }

  const json& carr = o.raw("clients");
  if (!carr.is_array() || carr.empty()) {
    throw ScenarioError(o.path() + ".clients: expected a non-empty array");
  }
  for (std::size_t i = 0; i < carr.size(); ++i) {
    spec.clients.push_back(
        parse_client(Obj(carr[i], o.path() + ".clients[" + std::to_string(i) +
                                      "]"),
                     s.motion));
  }

  if (auto sy = o.child_opt("sync")) {
    SyncSpec ss;
    ss.start_us = ms_to_us(sy->get<double>("start_ms", 100.0));
    ss.period_us = ms_to_us(sy->get<double>("period_ms", 100.0));
    ss.count = sy->get<int>("count", 5);
    sy->done();
    if (ss.period_us <= 0 || ss.count < 1) {
      throw ScenarioError(o.path() + ".sync: period/count must be positive");
    }
    spec.sync = ss;
  }

  const std::string path = o.path();
  o.done();

  // Shared-function contract: clients and server must integrate inputs
  // with the same step, so mixed input periods are rejected.
  const sim::TimeUs period = spec.clients.front().cfg.input_period_us;
  for (const ClientSpec& c : spec.clients) {
    if (c.cfg.input_period_us != period) {
      throw ScenarioError(path +
                          ".clients: input_period_ms must match across "
                          "clients (shared integration step)");
    }
  }
  s.input_dt_s = static_cast<double>(period) * 1e-6;

  // Entity/client id uniqueness across clients and bots.
  std::set<std::uint32_t> ids;
  for (const ClientSpec& c : spec.clients) {
    if (!ids.insert(c.cfg.client_id).second) {
      throw ScenarioError(path + ".clients: duplicate client_id " +
                          std::to_string(c.cfg.client_id));
    }
  }
  for (const gn::BotSpec& b : spec.bots) {
    if (!ids.insert(b.entity_id).second) {
      throw ScenarioError(path + ".bots: duplicate entity_id " +
                          std::to_string(b.entity_id));
    }
  }

  try {
    gn::validate(s);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return spec;
}

dtsched::DtScenario parse_dt(Obj o) {
  dtsched::DtScenario sc;
  sc.num_objects = o.get<std::uint64_t>("num_objects", std::uint64_t{40});
  sc.tau_s = o.get<double>("tau_s", 0.1);
  sc.q = o.get<double>("q", 0.01);
  sc.q_max = o.get<double>("q_max", 0.0);
  sc.horizon_slots = o.get<std::uint64_t>("horizon_slots",
                                          std::uint64_t{10'000});
  sc.r_position = o.get<double>("r_position", 0.25);
  sc.r_velocity = o.get<double>("r_velocity", 0.09);
  sc.energy_min_j = o.get<double>("energy_min_j", 0.030);
  sc.energy_max_j = o.get<double>("energy_max_j", 0.050);
  sc.max_queries = o.get<std::uint64_t>("max_queries", std::uint64_t{8});
  sc.variance_gate = o.get<double>("variance_gate", 0.5);
  sc.lambda = o.get<double>("lambda", 5.0);
  sc.confidence_uses_posterior =
      o.get<bool>("confidence_uses_posterior", false);
  sc.initial_pos_var = o.get<double>("initial_pos_var", 1.0);
  sc.initial_vel_var = o.get<double>("initial_vel_var", 1.0);
  sc.query_loss_prob = o.get<double>("query_loss_prob", 0.1);
  const std::string path = o.path();
  o.done();
  try {
    dtsched::validate(sc);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return sc;
}

}  // namespace

Scenario parse_scenario(const json& j, const std::string& name_hint) {
  Obj o(j, "scenario");
  Scenario sc;
  sc.name = o.get<std::string>("name", name_hint);
  if (sc.name.empty()) {
    throw ScenarioError("scenario.name: required field missing");
  }

  const json& seeds = o.raw("seeds");
  if (!seeds.is_array() || seeds.empty()) {
    throw ScenarioError("scenario.seeds: expected a non-empty array");
  }
  for (const auto& s : seeds) {
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      throw ScenarioError("scenario.seeds: expected integers");
    }
    sc.seeds.push_back(s.get<std::uint64_t>());
  }

  sc.duration_us = s_to_us(o.get<double>("duration_s", 10.0));
  if (sc.duration_us <= 0) {
    throw ScenarioError("scenario.duration_s: must be > 0");
  }
  try {
    sc.preset = metrics::preset_from_name(o.get<std::string>("preset", "none"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario.preset: ") + e.what());
  }

  if (auto n = o.child_opt("netcode")) {
    sc.netcode = parse_netcode(*n);
  }
  if (auto d = o.child_opt("dtsched")) {
    sc.dt = parse_dt(*d);
  }
  o.done();

  if (!sc.netcode.has_value() && !sc.dt.has_value()) {
    throw ScenarioError(
        "scenario: at least one of netcode/dtsched blocks is required");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file: " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("parse error in " + path.string() + ": " + e.what());
  }
  return parse_scenario(j, path.stem().string());
}

}  // namespace netsync::harness
