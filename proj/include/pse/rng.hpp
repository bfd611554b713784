#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace pse {

/// Seeded random stream used for all sampling. Wraps std::mt19937_64 (whose
/// output sequence is fixed by the standard) and maps to doubles with the
/// 53-bit mantissa trick, so identical seeds give identical samples on any
/// platform. std::* distributions are implementation-defined and must not be
/// used where reproducibility matters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller on the portable uniform stream.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Derives an independent substream seed (splitmix64 of seed and stream id).
  /// Stream ids are documented at each call site and recorded in reports.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// FNV-1a, for turning sample ids into per-sample stream ids.
  static std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return h;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pse
