#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "netsync/proto/entity.hpp"

namespace netsync::proto {

struct PriorityConfig {
  std::size_t budget = 8;           // entries per snapshot beyond the own entity
  double w_staleness = 1.0;         // weight on ticks since last send
  double w_relevance = 0.0;         // weight on spatial proximity
  double relevance_radius = 100.0;  // distance at which relevance hits 0
};

void validate(const PriorityConfig& cfg);

// Picks which entities enter the next snapshot for one client.
//
// score(e) = w_staleness * (current_tick - last_sent[e])
//          + w_relevance * max(0, 1 - dist(e, own) / relevance_radius)
//
// Entities never sent count as staleness current_tick + 1 (older than
// anything actually sent). The client's own entity is always first and
// does not consume budget; remaining slots go to the top scores, ties
// to the lower entity_id. Returns entity ids in emission order.
std::vector<std::uint32_t> prioritize(
    const std::vector<EntityState>& world, std::uint32_t own_entity_id,
    const std::unordered_map<std::uint32_t, std::uint64_t>& last_sent_tick,
    std::uint64_t current_tick, const PriorityConfig& cfg);

}  // namespace netsync::proto
