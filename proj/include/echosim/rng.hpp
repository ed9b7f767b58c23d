#pragma once

// Counter-based deterministic RNG. Every consumer (ion j, trial k, ...)
// derives an independent stream from (seed, stream index) and draws from it
// sequentially; no generator state is shared, so sampling order across
// workers cannot change results. The core is the splitmix64 output mix over
// a Weyl-sequence counter.

#include <cmath>
#include <cstdint>

#include "common.hpp"

namespace echosim {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(detail::mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1], safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform_in(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = kTwoPi * u2;
    cached_ = r * std::sin(phi);
    have_cached_ = true;
    return r * std::cos(phi);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Poisson deviate. Knuth's product method per <=32-mean chunk; chunk sums
  // of independent Poissons are Poisson, which keeps the draw deterministic
  // without a rejection loop whose iteration count depends on the platform's
  // floating-point quirks only through exp().
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 32.0) {
      total += poisson_knuth(32.0);
      mean -= 32.0;
    }
    return total + poisson_knuth(mean);
  }

 private:
  std::uint64_t poisson_knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t n = 0;
    do {
      prod *= uniform_pos();
      if (prod <= limit) break;
      ++n;
    } while (n < 4096);
    return n;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace echosim
