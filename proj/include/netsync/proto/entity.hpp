#pragma once

#include <cmath>
#include <cstdint>

#include "netsync/sim/event_queue.hpp"

namespace netsync::proto {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const = default;

  double norm() const { return std::sqrt(x * x + y * y); }

  // Zero vectors normalize to zero (a no-direction move is a stop).
  Vec2 normalized() const {
    const double n = norm();
    if (n == 0.0) {
      return {};
    }
    return {x / n, y / n};
  }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline Vec2 lerp(const Vec2& a, const Vec2& b, double alpha) {
  return {a.x + (b.x - a.x) * alpha, a.y + (b.y - a.y) * alpha};
}

/// One world entity as synchronized, interpolated, predicted and rewound.
/// last_input_seq counts the owning client's inputs applied so far; for
/// server-driven entities it stays 0.
struct EntityState {
  std::uint32_t entity_id = 0;
  Vec2 position;
  Vec2 velocity;
  std::uint32_t last_input_seq = 0;

  bool operator==(const EntityState& o) const = default;
};

// Linear interpolation of an entity between two timestamped states.
// t outside [ta, tb] extrapolates linearly; callers clamp as needed.
inline EntityState lerp_state(const EntityState& a, const EntityState& b,
                              sim::TimeUs ta, sim::TimeUs tb, sim::TimeUs t) {
  if (ta == tb) {
    return b;
  }
  const double alpha =
      static_cast<double>(t - ta) / static_cast<double>(tb - ta);
  EntityState out = b;
  out.position = lerp(a.position, b.position, alpha);
  out.velocity = lerp(a.velocity, b.velocity, alpha);
  return out;
}

}  // namespace netsync::proto
