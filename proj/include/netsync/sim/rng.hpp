#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace netsync::sim {

/// Deterministic random stream keyed by (seed, stream_id). Streams with
/// distinct ids are independent, so adding draws to one cannot perturb
/// another. All sampling is implemented on top of the raw engine output
/// (std::distribution objects are not portable across standard libraries).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  double uniform(double a, double b);
  // Box-Muller; the second variate is discarded to keep draws one-to-one.
  double normal(double mu, double sigma);
  bool bernoulli(double p);
  // Uniform integer in [0, n), rejection-sampled (n > 0).
  std::uint64_t uniform_int(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  const std::string& stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::mt19937_64 engine_;
};

// splitmix64 step; used to derive stream keys and usable standalone.
std::uint64_t mix64(std::uint64_t x);

}  // namespace netsync::sim
