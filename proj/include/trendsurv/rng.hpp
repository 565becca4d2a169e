#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace trendsurv {

// Fixed default so unseeded runs reproduce.
inline constexpr std::uint64_t kDefaultSeed = 0xA5EED;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// mt19937_64 with hand-rolled derived draws. The standard pins the engine's
// output sequence, and none of the draws below go through std::*_distribution,
// so identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Decorrelated child generator for stream `index` of a seeded run.
  static Rng for_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(detail::splitmix64(seed ^ detail::splitmix64(index + 1)));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0,1]; never exactly 0 so log() is safe.
  double next_unit() {
    return (double((eng_() >> 11)) + 1.0) * (1.0 / 9007199254740992.0);
  }

  // Standard normal via Box-Muller, second value cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586477 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = eng_();
    while (draw >= limit) draw = eng_();
    return draw % bound;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trendsurv
