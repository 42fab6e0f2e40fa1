#pragma once

#include <cstdint>

#include "oplab/types.hpp"

namespace oplab {

/// Counter-based 64-bit generator (splitmix64 core). Streams are cheap value
/// types; a substream is derived from (seed, index) so that sample i of a run
/// is independent of how work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    // Mix the raw xor so that adjacent indices do not yield correlated states.
    return Rng(mix(seed ^ mix(index + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  Real uniform() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; draws are consumed in fixed pairs.
  Real normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    Real u1 = uniform();
    Real u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    const Real phi = two_pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace oplab
