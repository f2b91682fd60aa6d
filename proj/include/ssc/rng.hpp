#pragma once

#include <cmath>
#include <cstdint>

namespace ssc {

/// Counter-based pseudo-random generator. The i-th output is a pure function
/// of (key, i) built on the SplitMix64 finalizer, so a stream can be
/// reproduced, split, and compared across runs; integer output is identical
/// on every platform. Not cryptographic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed) + kGolden * (stream + 1))) {}

  /// Independent child stream; derive(a) and derive(b) collide only if a == b.
  Rng derive(std::uint64_t stream) const {
    Rng child(0);
    child.key_ = mix(key_ ^ mix(kGolden * (stream + 1)));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n >= 1. Lemire's multiply-shift reduction.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ssc
