#pragma once

#include <cstdint>

namespace hjmm {

/// splitmix64 step: advances state and returns a mixed 64-bit value.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** generator.  State must never be all-zero; use make_engine.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  Xoshiro256ss() : s_{1, 2, 3, 4} {}
  explicit Xoshiro256ss(const std::uint64_t s[4]) : s_{s[0], s[1], s[2], s[3]} {}

  result_type operator()();

 private:
  std::uint64_t s_[4];
};

/// Identifies an independent random stream.  Streams are keyed purely by
/// (seed, path_index, substream) so any path can be regenerated in isolation
/// and results do not depend on scheduling or thread count.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::uint64_t substream = 0;
};

/// Substream tags; keep stable, they are part of the reproducibility contract.
namespace substream {
inline constexpr std::uint64_t brownian = 1;
inline constexpr std::uint64_t jump_times = 2;
inline constexpr std::uint64_t marks = 3;
inline constexpr std::uint64_t mark_quadrature = 4;
inline constexpr std::uint64_t sampler = 5;  // condition-checker curve draws
}  // namespace substream

Xoshiro256ss make_engine(const StreamKey& key);

/// Deterministic distributions on top of an engine.  All mappings from raw
/// bits to variates are implemented here (not via std:: distributions, whose
/// algorithms vary between standard libraries) so streams are portable.
class RandomSource {
 public:
  explicit RandomSource(const StreamKey& key) : eng_(make_engine(key)) {}

  /// Uniform on (0, 1] with 53-bit resolution (never returns 0, safe for log).
  double uniform01();

  /// Standard normal via Box-Muller; generates pairs, caches the second.
  double normal();

  /// Poisson count by inversion, chunked so large means stay exact.
  std::uint64_t poisson(double mean);

  /// Exponential with given rate.
  double exponential(double rate);

  std::uint64_t bits() { return eng_(); }

 private:
  double poisson_small(double mean);
  Xoshiro256ss eng_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace hjmm
