#include "hjmm/rng.hpp"

#include <cmath>

#include "hjmm/errors.hpp"

namespace hjmm {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256ss::result_type Xoshiro256ss::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

Xoshiro256ss make_engine(const StreamKey& key) {
  // Hash the key fields through splitmix64 so nearby keys give unrelated
  // states, then expand to the 256-bit state.
  std::uint64_t h = key.seed;
  h = h * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t mixer = h;
  (void)splitmix64(mixer);
  mixer ^= key.path_index * 0xd1342543de82ef95ULL;
  (void)splitmix64(mixer);
  mixer ^= key.substream * 0xaf251af3b0f025b5ULL;
  std::uint64_t s[4];
  bool nonzero = false;
  for (auto& word : s) {
    word = splitmix64(mixer);
    nonzero |= (word != 0);
  }
  if (!nonzero) s[0] = 1;  // all-zero state is invalid for xoshiro
  return Xoshiro256ss(s);
}

double RandomSource::uniform01() {
  // (0,1]: top 53 bits, then +1 before scaling.
  return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double RandomSource::poisson_small(double mean) {
  // Inversion: expected iterations = mean; only called with mean <= 32.
  const double u = uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  double k = 0;
  while (u > cdf && k < 1e6) {
    k += 1;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

std::uint64_t RandomSource::poisson(double mean) {
  if (mean < 0 || !std::isfinite(mean)) throw DomainError("poisson mean must be finite and >= 0");
  double total = 0;
  while (mean > 32.0) {  // sum of independent Poissons is Poisson
    total += poisson_small(32.0);
    mean -= 32.0;
  }
  total += poisson_small(mean);
  return static_cast<std::uint64_t>(total);
}

double RandomSource::exponential(double rate) {
  if (!(rate > 0)) throw DomainError("exponential rate must be > 0");
  return -std::log(uniform01()) / rate;
}

}  // namespace hjmm
