#pragma once

#include <cstdint>

namespace cacm {

/*
 * SplitMix64 (Steele/Lea/Vigna). Used for every seeded draw in the project
 * instead of std::mt19937 + std distributions, so that a given seed produces
 * bit-identical streams across platforms and standard libraries.
 */
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 significant bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Inclusive bounds. The modulo bias is far below anything these
  // simulations can resolve.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }

  bool chance(double p) { return next_double() < p; }

 private:
  uint64_t state_;
};

// Derives an independent stream from (seed, salt) without advancing any
// shared state. Episodes, iterations and executors each fork from here.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  Rng r(seed ^ (0xA0761D6478BD642Full * (salt + 1)));
  return r.next_u64();
}

}  // namespace cacm
