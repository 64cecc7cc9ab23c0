#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fraudbench {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named sub-streams derived from a single user-facing seed. Every random
// decision draws from the stream owning it, so adding draws to one purpose
// never shifts another.
namespace streams {
constexpr std::uint64_t kCounterparties = 0;
constexpr std::uint64_t kAmounts = 1;
constexpr std::uint64_t kMonths = 2;
constexpr std::uint64_t kTypologies = 3;
constexpr std::uint64_t kSplit = 4;
constexpr std::uint64_t kModelInit = 5;
constexpr std::uint64_t kPick = 6;
}  // namespace streams

/// xoshiro256** seeded through a splitmix64 chain over (seed, stream).
/// Fixed algorithm, no platform-dependent state: identical seeds give
/// identical sequences on every build.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL * (stream + 1));
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
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

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, n) via rejection sampling. n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via the Marsaglia polar method; the spare variate is
  /// discarded to keep the generator stateless between calls.
  double normal() {
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  /// Log-normal draw parameterized by its arithmetic mean and coefficient
  /// of variation: sigma^2 = ln(1 + cv^2), mu = ln(mean) - sigma^2 / 2.
  double lognormal(double mean, double cv) {
    const double sigma2 = std::log1p(cv * cv);
    const double mu = std::log(mean) - 0.5 * sigma2;
    return std::exp(mu + std::sqrt(sigma2) * normal());
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_int(i)]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace fraudbench
