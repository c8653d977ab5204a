#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace ssrelay {

namespace detail {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Identifier of an independent random stream.
///
/// Streams form a tree: `child(k)` hashes the parent key with `k`, so mapping
/// (trial index, link type) to `master.child(trial).child(link)` gives every
/// matrix of every trial its own reproducible stream. Replay is bit-exact for
/// a given master seed regardless of evaluation order or worker count.
class SeedPath {
 public:
  explicit SeedPath(std::uint64_t master) : key_(detail::mix64(master ^ detail::kGolden64)) {}

  SeedPath child(std::uint64_t id) const {
    return SeedPath(detail::mix64(key_ + detail::kGolden64 * (id + 1)), Raw{});
  }

  std::uint64_t key() const { return key_; }

 private:
  struct Raw {};
  SeedPath(std::uint64_t key, Raw) : key_(key) {}
  std::uint64_t key_;
};

/// Counter-style generator over a SeedPath (SplitMix64 sequence).
///
/// Gaussian draws use the polar form exp(j*2*pi*u) * sqrt(-v*ln(u')), which
/// pins the exact bit stream independently of any library distribution
/// implementation.
class Rng {
 public:
  explicit Rng(SeedPath path) : state_(path.key()) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden64;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log(uniform_pos()); }

  /// Circular symmetric complex Gaussian with E|z|^2 = variance
  /// (real and imaginary parts each N(0, variance/2)).
  std::complex<double> cgauss(double variance) {
    const double r = std::sqrt(-variance * std::log(uniform_pos()));
    const double phi = 6.283185307179586476925286766559 * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace ssrelay
