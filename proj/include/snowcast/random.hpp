#pragma once

/** @file
 * Reproducible random streams.
 *
 * Every stochastic routine in the library draws from a caller-owned
 * RandomStream. Streams are derived from a master seed and a counter, so the
 * draws seen by path i of an ensemble do not depend on how many other paths
 * exist or in which order they run.
 */

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace snowcast {

/// SplitMix64 finalizer; used for seeding and substream derivation.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combine a master seed with a sequence of counters into one 64-bit seed.
template <typename... Counters>
constexpr std::uint64_t derive_seed(std::uint64_t master, Counters... counters) noexcept {
  std::uint64_t h = splitmix64(master);
  ((h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(counters) + 0x632BE59BD9B4E019ULL))),
   ...);
  return h;
}

/**
 * xoshiro256** generator. Satisfies UniformRandomBitGenerator so it also
 * works with <random> distributions, although the library only uses the
 * portable samplers below to keep output identical across standard
 * library implementations.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0) noexcept {
    std::uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      s = splitmix64(x);
    }
  }

  /// Independent stream for element `index` under `master`.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) noexcept {
    return RandomStream(derive_seed(master, index));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// log of a Gamma(shape, 1) variate. Marsaglia-Tsang; shapes below one
  /// use the U^(1/shape) boost carried out in log space so tiny shapes do
  /// not underflow before the caller decides what to do with the value.
  double log_gamma_unit(double shape) noexcept {
    if (shape < 1.0) {
      const double log_boost = std::log(uniform()) / shape;
      return log_gamma_unit(shape + 1.0) + log_boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
};

}  // namespace snowcast
