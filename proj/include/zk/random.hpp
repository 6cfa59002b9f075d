#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "zk/field.hpp"

namespace zk {

/// SplitMix64 finaliser; used to derive per-mode random numbers from integer keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Small counter-based generator. Streams depend only on the seed, so results
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

  std::uint64_t next() { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }
  /// Uniform in (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }
  Complex complex_normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::uint64_t state_;
};

/// Complex Gaussian keyed by (seed, integer mode); identical on any grid that contains the mode.
inline Complex hashed_complex_normal(std::uint64_t seed, int mx, int my, int mz) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(mx)));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(my)));
  h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(mz)));
  Rng r(h);
  return r.complex_normal();
}

}  // namespace zk
