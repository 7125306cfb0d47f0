#pragma once

#include <cstdint>

namespace evt {

// SplitMix64 finalizer (Steele, Lea & Flood). Fixed bit-exactly: it doubles
// as the per-replication seed mixer of the harness, so changing these
// constants would silently change every seeded experiment.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based uniform generator: output i of seed s is
// mix64(s + i * 2^64/phi), a pure function of (s, i). Streams under distinct
// seeds are of independent quality; there is no shared state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw on the open interval (0,1): 53-bit mantissa, half-ulp
  // offset so that 0 and 1 are unreachable (inverse transforms stay finite).
  double next_unit() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace evt
