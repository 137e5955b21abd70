#include "netsync/sim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace netsync::sim {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::string_view stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(mix64(seed ^ mix64(fnv1a64(stream_id)))) {}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
  if (!(a <= b)) {
    throw std::invalid_argument("RngStream::uniform: a must be <= b");
  }
  return a + uniform01() * (b - a);
}

double RngStream::normal(double mu, double sigma) {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mu + sigma * z;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) {
    return false;
  }
  if (p >= 1.0) {
    return true;
  }
  return uniform01() < p;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("RngStream::uniform_int: n must be > 0");
  }
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t v = next_u64();
  while (v >= limit) {
    v = next_u64();
  }
  return v % n;
}

}  // namespace netsync::sim
