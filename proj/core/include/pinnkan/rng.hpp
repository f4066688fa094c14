#pragma once

#include <cstdint>
#include <random>

namespace pinnkan {

// Deterministic uniform generator. Doubles are built from the top 53 bits of
// the mt19937_64 stream instead of std::uniform_real_distribution, whose
// output is implementation-defined; this keeps sampled batches identical for
// a given seed regardless of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // in [0, 1)
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // in [0, n). Modulo bias is below 2^-32 for the n used here (faces, small
  // index picks) and the reduction is platform-independent.
  std::uint32_t bounded(std::uint32_t n) {
    return static_cast<std::uint32_t>(eng_() % n);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pinnkan
