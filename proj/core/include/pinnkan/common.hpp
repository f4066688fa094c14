#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pinnkan {

// Raised for malformed configs, bad CLI input, unusable files. The CLI maps
// this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a numeric routine cannot proceed (non-finite value on the tape,
// eigensolver stall, zero probe vector, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All numeric text output uses 17 significant digits so that doubles
// round-trip exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt17(std::size_t v) { return std::to_string(v); }

// splitmix64, used to derive independent seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mixes a tag into a seed; repeated application derives disjoint streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

}  // namespace pinnkan
