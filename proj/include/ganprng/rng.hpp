#pragma once

#include <cstdint>
#include <random>

namespace ganprng {

/// Derives an independent stream seed from a base seed. Used to give the
/// generator init, adversary init, batch sampling and the reference source
/// their own deterministic streams from one configured seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic RNG for everything randomized inside the library.
///
/// mt19937_64 is specified bit-exactly by the standard, so seeded runs
/// replay identically across platforms. The distribution helpers extract
/// bits directly instead of going through std::uniform_*_distribution,
/// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform 16-bit word.
  std::uint16_t next_word16() {
    return static_cast<std::uint16_t>(engine_() >> 48);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_real01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_real01();
  }

  /// Uniform index in [0, n), unbiased via rejection.
  std::size_t next_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ganprng
