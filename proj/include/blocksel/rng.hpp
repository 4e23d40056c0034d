#ifndef BLOCKSEL_RNG_HPP
#define BLOCKSEL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace blocksel {

// Reproducible random numbers. The engine is std::mt19937_64, whose bit
// stream is fully specified by the standard; the uniform and normal
// transforms below are hand-rolled because the std distributions are
// implementation-defined. Identifier reported in output metadata.
inline constexpr const char* kRngId = "mt19937_64/boxmuller";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream-splitting rule: substream k of a master seed is seeded with
/// splitmix64(master + k + 1). Used to give replicates (and stages within a
/// replicate) independent, schedule-free streams.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t k) {
  return splitmix64(master + k + 1);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng substream(std::uint64_t master, std::uint64_t k) {
    return Rng(substream_seed(master, k));
  }

  std::uint64_t bits() { return eng_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = bits();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace blocksel

#endif  // BLOCKSEL_RNG_HPP
