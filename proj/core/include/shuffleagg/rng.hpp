#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace shuffleagg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with hand-rolled distributions. The standard library does
// not pin distribution algorithms across implementations, so everything that
// feeds experiment output is sampled here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)), base_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t seed_for(std::uint64_t salt) {
    return splitmix64(next_u64() ^ splitmix64(salt));
  }

  // Independent stream keyed by (this rng's seed material, salt). Does not
  // advance this generator, so stream identity depends only on the salt.
  Rng derive(std::uint64_t salt) const {
    return Rng(splitmix64(base_ ^ splitmix64(salt ^ 0xa02bdbf7bb3c0a7ULL)));
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), rejection-sampled.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    cached_ = mag * std::sin(2.0 * M_PI * u2);
    have_cached_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  // Polya (negative binomial) with shape r > 0 and parameter beta in [0,1):
  // pmf(k) = C(k+r-1, k) (1-beta)^r beta^k. Sampled by sequential inversion;
  // the mean r*beta/(1-beta) is small in every configuration we emit, so the
  // expected work per draw is O(1 + mean).
  std::uint64_t polya(double shape, double beta) {
    if (shape <= 0.0) throw std::invalid_argument("polya: shape must be positive");
    if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("polya: beta must be in [0,1)");
    if (beta == 0.0) return 0;
    const double u = uniform01();
    double pk = std::exp(shape * std::log1p(-beta));  // (1-beta)^shape
    double cdf = pk;
    std::uint64_t k = 0;
    while (cdf <= u) {
      pk *= beta * (static_cast<double>(k) + shape) / (static_cast<double>(k) + 1.0);
      cdf += pk;
      ++k;
      if (k > (1ULL << 40)) throw std::runtime_error("polya: inversion failed to terminate");
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t base_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace shuffleagg
