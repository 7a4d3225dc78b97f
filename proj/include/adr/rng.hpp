#pragma once

#include <cstdint>

namespace adr {

/// SplitMix64 finalizer mix. Used both inside the generator and to derive
/// decorrelated child seeds from (seed, stream) pairs.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// SplitMix64: a tiny, portable, splittable 64-bit generator
/// (Steele, Lea & Flood 2014; public-domain reference constants).
///
/// The whole simulator draws randomness through this class so that runs are
/// reproducible from a single u64 seed on any platform, independent of the
/// standard library's distribution implementations.
class SplitMix64 {
 public:
  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix64(z);
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, n) via Lemire's multiply-shift
  /// (bias < 2^-64 for any n that fits practical use here).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

  bool operator==(const SplitMix64& o) const = default;

 private:
  std::uint64_t state_ = 0;
};

/// Deterministic child-seed derivation: decorrelates parallel streams
/// (workers, cases, iterations) drawn from one top-level seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1,
                                           std::uint64_t s2) {
  return derive_seed(derive_seed(base, s1), s2);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1,
                                           std::uint64_t s2, std::uint64_t s3) {
  return derive_seed(derive_seed(base, s1, s2), s3);
}

}  // namespace adr
