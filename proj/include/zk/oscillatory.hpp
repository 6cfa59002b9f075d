#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zk/bump.hpp"
#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/spectral.hpp"

namespace zk {

/// The kernels I_0 (cutoff p_0, ball) and I_k (delta_k on one axis, p_k on the other two).
struct OscillatoryKernel {
  enum class Kind { I0, Ik } kind = Kind::I0;
  int axis = 0;  ///< axis carrying delta_k (Ik only)
  int k = 0;

  static OscillatoryKernel i0() { return {}; }
  static OscillatoryKernel ik(int axis, int k) {
    if (axis < 0 || axis > 2) throw InvalidArgument("OscillatoryKernel: axis must be 0, 1 or 2");
    if (k < 1) throw InvalidArgument("OscillatoryKernel: I_k needs k >= 1");
    return {Kind::Ik, axis, k};
  }

  std::string name() const {
    return kind == Kind::I0 ? "I0" : "I" + std::to_string(k) + "_" + "xyz"[axis];
  }

  /// 1D factor on the given axis (Ik only).
  double factor(int a, double v) const {
    const double r = std::ldexp(std::abs(v), -k);
    return a == axis ? delta_value(r) : bump_value(r);
  }

  double symbol(double xi, double eta, double mu) const {
    if (kind == Kind::I0) return bump_value(std::sqrt(xi * xi + eta * eta + mu * mu));
    return factor(0, xi) * factor(1, eta) * factor(2, mu);
  }

  /// Half-width of the frequency support on axis a.
  double support(int a) const {
    if (kind == Kind::I0) return 2.0;
    return std::ldexp(a == axis ? 4.0 : 2.0, k);
  }

  /// Length unit: 2^-k for I_k, 1 for I_0.
  double unit() const { return kind == Kind::I0 ? 1.0 : std::ldexp(1.0, -k); }
};

namespace detail {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
inline constexpr unsigned kQuadratureDepth = 18;

/// Integrates a complex function over [a, b], splitting at the listed interior points.
template <class F>
Complex integrate_pieces(F&& f, std::initializer_list<double> cuts, double tol, double& error) {
  Complex sum{};
  const double* p = cuts.begin();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(p[i + 1] > p[i])) continue;
    double e = 0.0;
    sum += GK::integrate(f, p[i], p[i + 1], kQuadratureDepth, tol, &e);
    error += e;
  }
  return sum;
}

}  // namespace detail

/// Nested adaptive Gauss-Kronrod evaluation of the kernel at (t, x). Throws
/// AccuracyError when the estimated error exceeds 1e-6 |value|.
inline Complex oscillatory_quadrature(const OscillatoryKernel& K, double t, std::array<double, 3> x,
                                      double tol = 1e-11) {
  double error = 0.0;
  Complex value;
  if (K.kind == OscillatoryKernel::Kind::Ik) {
    // omega = xi^3 + xi (eta^2 + mu^2): separable once xi is fixed.
    const int a1 = 1, a2 = 2;
    auto transverse = [&](int a, double y, double s, double& err) {
      const double w = K.support(a);
      const double u = K.unit();
      auto g = [&](double eta) { return K.factor(a, eta) * std::polar(1.0, y * eta + s * eta * eta); };
      return detail::integrate_pieces(g, {-w, -w / 2, -1.0 / u, 0.0, 1.0 / u, w / 2, w}, tol, err);
    };
    const double w0 = K.support(0);
    const double u0 = 1.0 / K.unit();
    double inner_error = 0.0;
    double weight = 0.0;
    auto outer = [&](double xi) -> Complex {
      const double f = K.factor(0, xi);
      if (f == 0.0) return 0.0;
      double e2 = 0.0, e3 = 0.0;
      const Complex g2 = transverse(a1, x[1], t * xi, e2);
      const Complex g3 = transverse(a2, x[2], t * xi, e3);
      const double bound = f * (e2 * std::abs(g3) + std::abs(g2) * e3);
      if (bound > inner_error) inner_error = bound;
      weight = std::max(weight, f);
      return f * std::polar(1.0, x[0] * xi + t * xi * xi * xi) * g2 * g3;
    };
    value = detail::integrate_pieces(outer, {-w0, -2.0 * u0, -u0, 0.0, u0, 2.0 * u0, w0}, tol, error);
    error += inner_error * 2.0 * w0;
  } else {
    // Cylindrical coordinates about the xi axis; the angular integral is 2 pi J_0(rho r_perp).
    const double rp = std::hypot(x[1], x[2]);
    double inner_error = 0.0;
    auto outer = [&](double xi) -> Complex {
      const double r1 = 4.0 - xi * xi;
      if (r1 <= 0.0) return 0.0;
      auto radial = [&](double rho) {
        const double r = std::sqrt(xi * xi + rho * rho);
        return rho * bump_value(r) * std::cyl_bessel_j(0.0, rho * rp) * std::polar(1.0, t * xi * rho * rho);
      };
      const double h = std::sqrt(r1);
      const double knee = xi * xi < 1.0 ? std::sqrt(1.0 - xi * xi) : 0.0;
      double e = 0.0;
      const Complex v = detail::integrate_pieces(radial, {0.0, knee, h}, tol, e);
      inner_error = std::max(inner_error, e);
      return 2.0 * std::numbers::pi * v * std::polar(1.0, x[0] * xi + t * xi * xi * xi);
    };
    value = detail::integrate_pieces(outer, {-2.0, -1.0, 0.0, 1.0, 2.0}, tol, error);
    error += 2.0 * std::numbers::pi * inner_error * 4.0;
  }
  if (!(error <= 1e-6 * std::abs(value))) {
    throw AccuracyError("oscillatory_quadrature: " + K.name() + " error estimate " + std::to_string(error) +
                        " exceeds 1e-6 |value| = " + std::to_string(1e-6 * std::abs(value)));
  }
  return value;
}

/// The kernel's symbol sampled on the dual lattice, spectral field.
inline Field kernel_symbol(const OscillatoryKernel& K, const FourierGrid& g) {
  for (int a = 0; a < 3; ++a) {
    if (g.nyquist(a) < K.support(a)) {
      throw GridTooCoarse("kernel_symbol: " + K.name() + " needs Nyquist >= " + std::to_string(K.support(a)) +
                          " on axis " + std::to_string(a) + ", grid has " + std::to_string(g.nyquist(a)));
    }
  }
  Field s(g, Representation::spectral);
  auto d = s.data();
  for_each_mode(g, [&](const Mode& m) { d[m.flat] = K.symbol(m.xi, m.eta, m.mu); });
  return s;
}

/// Kernel values on every node of g by FFT: (2 pi)^{3/2} F^{-1}(e^{i t omega} psi).
/// This is the periodisation of the kernel over the box.
inline Field oscillatory_fft(const Field& symbol, double t) {
  Field out = inverse(free_propagate(symbol, t));
  out *= Complex(std::pow(2.0 * std::numbers::pi, 1.5));
  return out;
}

/// Zero-padded lattice for the fast mode: box of `box_units` kernel units per axis and
/// just enough points to hold the frequency support.
inline FourierGrid padded_kernel_grid(const OscillatoryKernel& K, double box_units = 192.0) {
  std::array<int, 3> n{};
  std::array<double, 3> L{};
  for (int a = 0; a < 3; ++a) {
    L[a] = box_units * K.unit();
    int m = 8;
    while (m * std::numbers::pi / L[a] < K.support(a) * (1.0 + 1e-12)) m *= 2;
    n[a] = m;
  }
  return make_grid(n, L);
}

/// Fast-mode point evaluation on a padded grid; x must be a lattice node of that grid.
inline Complex oscillatory_fft_at(const OscillatoryKernel& K, double t, std::array<double, 3> x,
                                  double box_units = 192.0) {
  const FourierGrid g = padded_kernel_grid(K, box_units);
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double pos = (x[a] + 0.5 * g.length(a)) / g.spacing(a);
    idx[a] = static_cast<int>(std::lround(pos));
    if (std::abs(pos - idx[a]) > 1e-9 || idx[a] < 0 || idx[a] >= g.n(a)) {
      throw InvalidArgument("oscillatory_fft_at: point is not a node of the padded grid");
    }
  }
  return oscillatory_fft(kernel_symbol(K, g), t)(idx[0], idx[1], idx[2]);
}

}  // namespace zk
