#pragma once

#include <cmath>
#include <functional>

#include "zk/fft.hpp"
#include "zk/field.hpp"
#include "zk/random.hpp"
#include "zk/spectral.hpp"

namespace zk::testing {

/// Real white-noise field, physical.
inline Field random_real(const FourierGrid& g, std::uint64_t seed) {
  Rng r(seed);
  Field f(g, Representation::physical);
  for (auto& v : f.data()) v = r.normal();
  return f;
}

/// Complex white-noise field, physical.
inline Field random_complex(const FourierGrid& g, std::uint64_t seed) {
  Rng r(seed);
  Field f(g, Representation::physical);
  for (auto& v : f.data()) v = r.complex_normal();
  return f;
}

/// Real field with spectrum inside |xi| <= radius (physical).
inline Field random_band(const FourierGrid& g, double radius, std::uint64_t seed) {
  Rng r(seed);
  Field s(g, Representation::spectral);
  for_each_mode(g, [&](const Mode& m) {
    const double k = std::sqrt(m.xi * m.xi + m.eta * m.eta + m.mu * m.mu);
    const Complex z = r.complex_normal();
    if (k <= radius && !g.is_nyquist(0, m.ix) && !g.is_nyquist(1, m.iy) && !g.is_nyquist(2, m.iz)) s[m.flat] = z;
  });
  Field p = inverse(std::move(s));
  p.make_real();
  return p;
}

inline double rel_diff(const Field& a, const Field& b) {
  const double n = l2_norm(b);
  return n == 0.0 ? l2_norm(a - b) : l2_norm(a - b) / n;
}

}  // namespace zk::testing
