#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "zk/bump.hpp"
#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/projection.hpp"
#include "zk/random.hpp"
#include "zk/spectral.hpp"

namespace zk {

/// KdV soliton 3c sech^2(sqrt(c)(x - x0)/2), constant in y and z.
inline Field plane_soliton(const FourierGrid& g, double c, double x0 = 0.0) {
  if (!(c > 0.0)) throw InvalidArgument("plane_soliton: speed must be positive");
  const double a = 0.5 * std::sqrt(c);
  return Field::from_function(g, [=](double x, double, double) {
    const double s = 1.0 / std::cosh(a * (x - x0));
    return 3.0 * c * s * s;
  });
}

/// Profile of the plane soliton after time t, wrapped onto the periodic box.
inline Field plane_soliton_at(const FourierGrid& g, double c, double t, double x0 = 0.0) {
  const double L = g.length(0);
  double shift = std::fmod(x0 + c * t + 0.5 * L, L);
  if (shift < 0.0) shift += L;
  shift -= 0.5 * L;
  const double a = 0.5 * std::sqrt(c);
  return Field::from_function(g, [=](double x, double, double) {
    double v = 0.0;
    for (int w = -2; w <= 2; ++w) {
      const double s = 1.0 / std::cosh(a * (x - shift + w * L));
      v += s * s;
    }
    return 3.0 * c * v;
  });
}

/// amplitude * exp(-|x|^2 / (2 sigma^2)).
inline Field gaussian(const FourierGrid& g, double sigma, double amplitude) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian: sigma must be positive");
  return Field::from_function(g, [=](double x, double y, double z) {
    return amplitude * std::exp(-(x * x + y * y + z * z) / (2.0 * sigma * sigma));
  });
}

/// Real field whose spectrum is i.i.d. complex Gaussian times delta_k, unit L2 norm. Spectral output.
inline Field random_shell_spectral(const FourierGrid& g, int k, std::uint64_t seed) {
  const Mask mask = projector_mask(g, Projector::Delta, k);
  Field s(g, Representation::spectral);
  Rng rng(seed);
  auto d = s.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.complex_normal() * (*mask)[i];
  Field h = hermitian_symmetrize(s);
  const double n = l2_norm(h);
  if (n == 0.0) return h;
  h *= Complex(1.0 / n);
  return h;
}

inline Field random_shell(const FourierGrid& g, int k, std::uint64_t seed) {
  Field p = inverse(random_shell_spectral(g, k, seed));
  p.make_real();
  return p;
}

/// Unit-norm shell-k packet that focuses at (x0, t0): phi_hat = delta_k exp(-i(x0.xi + t0 omega)).
inline Field focusing_packet(const FourierGrid& g, int k, std::array<double, 3> x0, double t0) {
  const Mask mask = projector_mask(g, Projector::Delta, k);
  Field s(g, Representation::spectral);
  auto d = s.data();
  for_each_mode(g, [&](const Mode& m) {
    const double phase = x0[0] * g.odd_frequency(0, m.ix) + x0[1] * m.eta + x0[2] * m.mu + t0 * lattice_omega(g, m);
    d[m.flat] = (*mask)[m.flat] * std::polar(1.0, -phase);
  });
  Field h = hermitian_symmetrize(s);
  const double n = l2_norm(h);
  if (n > 0.0) h *= Complex(1.0 / n);
  Field p = inverse(std::move(h));
  p.make_real();
  return p;
}

/// Real band-limited field with grid-independent coefficients: the coefficient at
/// integer mode m is hashed from (seed, m), weighted by `envelope(|xi|)`, and kept
/// only where |xi| <= radius. Grids sharing the box and containing the band give
/// the same function. Spectral output, not normalised.
inline Field random_bandlimited_spectral(const FourierGrid& g, double radius, std::uint64_t seed,
                                         const std::function<double(double)>& envelope) {
  Field s(g, Representation::spectral);
  auto d = s.data();
  for_each_mode(g, [&](const Mode& m) {
    const double r = std::sqrt(m.xi * m.xi + m.eta * m.eta + m.mu * m.mu);
    if (r > radius) return;
    if (g.is_nyquist(0, m.ix) || g.is_nyquist(1, m.iy) || g.is_nyquist(2, m.iz)) return;
    d[m.flat] = envelope(r) * hashed_complex_normal(seed, g.mode(0, m.ix), g.mode(1, m.iy), g.mode(2, m.iz));
  });
  return hermitian_symmetrize(s);
}

/// The sharpness witness: phi_hat = delta_{-2k}(xi) delta_k(eta) delta_k(mu) with 1D deltas of |.|.
inline Field sharpness_phi_k_spectral(const FourierGrid& g, int k) {
  Field s(g, Representation::spectral);
  auto d = s.data();
  for_each_mode(g, [&](const Mode& m) {
    d[m.flat] = delta_value(std::ldexp(std::abs(m.xi), 2 * k)) * delta_value(std::ldexp(std::abs(m.eta), -k)) *
                delta_value(std::ldexp(std::abs(m.mu), -k));
  });
  return s;
}

inline Field sharpness_phi_k(const FourierGrid& g, int k) {
  Field p = inverse(sharpness_phi_k_spectral(g, k));
  p.make_real();
  return p;
}

}  // namespace zk
