#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pclab {

/// SplitMix64 step; used to whiten seeds and derive independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream id for (seed, part...) tuples, e.g. per-sample attack streams.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Parts... parts) {
  ((seed = splitmix64(seed ^ static_cast<std::uint64_t>(parts))), ...);
  return splitmix64(seed);
}

/// Deterministic RNG. std::mt19937_64 has a standard-pinned sequence; the
/// distributions below are hand-rolled because the std ones are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  float uniform(float lo, float hi) {
    return lo + static_cast<float>(next_double()) * (hi - lo);
  }

  /// Unbiased integer in [0, n).
  std::uint32_t bounded(std::uint32_t n) {
    const std::uint64_t span = 1ULL << 32;
    const std::uint64_t limit = span - span % n;
    std::uint64_t x;
    do {
      x = next_u64() >> 32;
    } while (x >= limit);
    return static_cast<std::uint32_t>(x % n);
  }

  /// Standard normal via Box-Muller, one value per call.
  float normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = static_cast<float>(r * std::sin(a));
    have_spare_ = true;
    return static_cast<float>(r * std::cos(a));
  }

 private:
  std::mt19937_64 eng_;
  float spare_ = 0.0f;
  bool have_spare_ = false;
};

}  // namespace pclab
