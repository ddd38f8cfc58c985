#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pilotwave {

// SplitMix64 (Steele/Lea/Flood). One 64-bit word of state, a fixed mixing
// function, no implementation-defined behavior anywhere, so every stream is
// bit-reproducible across compilers and platforms. Independent substreams
// are derived by hashing (seed, stream); parallel schedules therefore cannot
// perturb results.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Standard normal, Box-Muller. Always consumes exactly two draws so the
  // stream position is predictable.
  double next_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1]: keeps log() finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Deterministic child seed for substream `stream` of `seed`.
  static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    g.next_u64();
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace pilotwave
