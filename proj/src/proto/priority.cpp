#include "netsync/proto/priority.hpp"

#include <algorithm>
#include <stdexcept>

namespace netsync::proto {

void validate(const PriorityConfig& cfg) {
  if (cfg.budget < 1) {
    throw std::invalid_argument("priority budget must be >= 1");
  }
  if (cfg.w_staleness < 0.0 || cfg.w_relevance < 0.0) {
    throw std::invalid_argument("priority weights must be >= 0");
  }
  if (cfg.w_staleness == 0.0 && cfg.w_relevance == 0.0) {
    throw std::invalid_argument("priority weights must not both be 0");
  }
  if (cfg.relevance_radius <= 0.0) {
    throw std::invalid_argument("relevance_radius must be > 0");
  }
}

std::vector<std::uint32_t> prioritize(
    const std::vector<EntityState>& world, std::uint32_t own_entity_id,
    const std::unordered_map<std::uint32_t, std::uint64_t>& last_sent_tick,
    std::uint64_t current_tick, const PriorityConfig& cfg) {
  validate(cfg);

  const EntityState* own = nullptr;
  for (const EntityState& e : world) {
    if (e.entity_id == own_entity_id) {
      own = &e;
      break;
    }
  }
  if (own == nullptr) {
    throw std::invalid_argument("own entity not present in world");
  }

  struct Scored {
    double score;
    std::uint32_t entity_id;
  };
  std::vector<Scored> scored;
  scored.reserve(world.size());
  for (const EntityState& e : world) {
    if (e.entity_id == own_entity_id) {
      continue;
    }
    double staleness = static_cast<double>(current_tick) + 1.0;
    if (auto it = last_sent_tick.find(e.entity_id);
        it != last_sent_tick.end()) {
      staleness = static_cast<double>(current_tick - it->second);
    }
    const double rel = std::max(
        0.0, 1.0 - distance(e.position, own->position) / cfg.relevance_radius);
    scored.push_back(
        {cfg.w_staleness * staleness + cfg.w_relevance * rel, e.entity_id});
  }

  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.entity_id < b.entity_id;
  });

  std::vector<std::uint32_t> out;
  out.reserve(1 + std::min(cfg.budget, scored.size()));
  out.push_back(own_entity_id);
  for (std::size_t i = 0; i < scored.size() && i < cfg.budget; ++i) {
    out.push_back(scored[i].entity_id);
  }
  return out;
}

}  // namespace netsync::proto
