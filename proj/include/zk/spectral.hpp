#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/field.hpp"

namespace zk {

/// Lattice point handed to multipliers: FFT-order indices plus frequencies.
struct Mode {
  std::size_t flat;
  int ix, iy, iz;
  double xi, eta, mu;
};

/// Visits every lattice point of `grid` in storage order.
template <class F>
void for_each_mode(const FourierGrid& grid, F&& f) {
  for (int iz = 0; iz < grid.n(2); ++iz) {
    const double mu = grid.frequency(2, iz);
    for (int iy = 0; iy < grid.n(1); ++iy) {
      const double eta = grid.frequency(1, iy);
      for (int ix = 0; ix < grid.n(0); ++ix) {
        f(Mode{grid.flat(ix, iy, iz), ix, iy, iz, grid.frequency(0, ix), eta, mu});
      }
    }
  }
}

/// ZK dispersion symbol xi * (xi^2 + eta^2 + mu^2).
constexpr double symbol_omega(double xi, double eta, double mu) { return xi * (xi * xi + eta * eta + mu * mu); }

/// The symbol as used on the lattice: xi taken as 0 on the x-Nyquist plane.
inline double lattice_omega(const FourierGrid& g, const Mode& m) {
  return symbol_omega(g.odd_frequency(0, m.ix), m.eta, m.mu);
}

/// How multipliers see the x-Nyquist plane.
enum class NyquistRule {
  keep,        ///< pass the true frequency -n/2 * 2pi/L
  odd_in_x,    ///< pass xi = 0 there (for multipliers odd in xi)
};

/// Pointwise spectral multiplication by m(xi, eta, mu). Returns the result in
/// the input representation. Throws SingularMultiplier at the first lattice
/// point where m is not finite.
template <class M>
Field multiplier_apply(const Field& f, M&& m, NyquistRule rule = NyquistRule::keep) {
  const Representation rep = f.rep();
  Field s = to_spectral(f);
  const auto& g = s.grid();
  auto d = s.data();
  for_each_mode(g, [&](const Mode& p) {
    const double xi = rule == NyquistRule::odd_in_x ? g.odd_frequency(0, p.ix) : p.xi;
    const Complex value = m(xi, p.eta, p.mu);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      std::ostringstream os;
      os << "multiplier not finite at lattice point (" << g.mode(0, p.ix) << ", " << g.mode(1, p.iy) << ", "
         << g.mode(2, p.iz) << "), frequency (" << xi << ", " << p.eta << ", " << p.mu << ")";
      throw SingularMultiplier(os.str());
    }
    d[p.flat] *= value;
  });
  return to_rep(std::move(s), rep);
}

/// U(t) = F^{-1} exp(i t omega) F, returned in the input representation.
inline Field free_propagate(const Field& f, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("free_propagate: time must be finite");
  if (t == 0.0) return f;
  const Representation rep = f.rep();
  Field s = to_spectral(f);
  const auto& g = s.grid();
  auto d = s.data();
  for_each_mode(g, [&](const Mode& p) { d[p.flat] *= std::polar(1.0, t * lattice_omega(g, p)); });
  return to_rep(std::move(s), rep);
}

/// Advances U(t) phi_hat on a uniform time lattice t0 + j dt by repeated multiplication
/// with exp(i dt omega), resynchronising with the exact phase every `resync` steps.
class FreeEvolution {
 public:
  FreeEvolution(const Field& phi, double t0, double dt, int resync = 128)
      : phi_(to_spectral(phi)), t0_(t0), dt_(dt), resync_(resync), state_(free_propagate(phi_, t0)) {
    const auto& g = phi_.grid();
    step_.resize(g.size());
    for_each_mode(g, [&](const Mode& p) { step_[p.flat] = std::polar(1.0, dt * lattice_omega(g, p)); });
  }

  double time() const { return t0_ + j_ * dt_; }
  /// Spectral state at time().
  const Field& state() const { return state_; }

  void advance() {
    ++j_;
    if (j_ % resync_ == 0) {
      state_ = free_propagate(phi_, time());
      return;
    }
    auto d = state_.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= step_[i];
  }

 private:
  Field phi_;
  double t0_, dt_;
  int resync_;
  long j_ = 0;
  Field state_;
  std::vector<Complex> step_;
};

/// Spectral partial derivative along `axis` (0 = x); Nyquist wavenumber treated as zero.
inline Field derivative(const Field& f, int axis) {
  const Representation rep = f.rep();
  Field s = to_spectral(f);
  const auto& g = s.grid();
  auto d = s.data();
  for_each_mode(g, [&](const Mode& p) {
    const int i = axis == 0 ? p.ix : axis == 1 ? p.iy : p.iz;
    d[p.flat] *= Complex(0.0, g.odd_frequency(axis, i));
  });
  return to_rep(std::move(s), rep);
}

inline std::array<Field, 3> gradient(const Field& f) {
  const Field s = to_spectral(f);
  return {to_rep(derivative(s, 0), f.rep()), to_rep(derivative(s, 1), f.rep()), to_rep(derivative(s, 2), f.rep())};
}

/// Multiplier flag raised by the inverse-gradient when the zero mode is not negligible.
struct MultiplierFlags {
  bool zero_mode_warning = false;
};

/// |grad| as the multiplier |xi|.
inline Field abs_gradient(const Field& f) {
  return multiplier_apply(f, [](double a, double b, double c) { return Complex(std::sqrt(a * a + b * b + c * c)); });
}

/// |grad|^2 as the multiplier |xi|^2 (minus the Laplacian).
inline Field abs_gradient_squared(const Field& f) {
  return multiplier_apply(f, [](double a, double b, double c) { return Complex(a * a + b * b + c * c); });
}

/// |grad|^{-1}: multiplier 1/|xi| away from the origin, 0 at the zero mode.
/// Sets the warning flag when |zero mode| > 1e-10 * ||f||.
inline Field inverse_abs_gradient(const Field& f, MultiplierFlags* flags = nullptr) {
  const Field s = to_spectral(f);
  const double zero_mode = std::abs(s[0]);
  const double norm = l2_norm(s);
  if (flags != nullptr) flags->zero_mode_warning = zero_mode * std::sqrt(s.grid().dual_cell_volume()) > 1e-10 * norm;
  Field out = multiplier_apply(s, [](double a, double b, double c) {
    const double r = std::sqrt(a * a + b * b + c * c);
    return Complex(r == 0.0 ? 0.0 : 1.0 / r);
  });
  return to_rep(std::move(out), f.rep());
}

/// Japanese bracket <grad>^s, multiplier (1 + |xi|^2)^{s/2}.
inline Field bessel_potential(const Field& f, double s) {
  return multiplier_apply(
      f, [s](double a, double b, double c) { return Complex(std::pow(1.0 + a * a + b * b + c * c, 0.5 * s)); });
}

/// Projects a physical field onto real values through the spectral Hermitian part:
/// forward(Re(inverse(f))). Accepts either representation, returns spectral.
inline Field hermitian_symmetrize(const Field& f) {
  Field p = to_physical(f);
  p.make_real();
  return forward(std::move(p));
}

/// max |Im u| / max |u| of the physical representation.
inline double imaginary_residue(const Field& f) {
  const Field p = to_physical(f);
  const double m = p.max_abs();
  return m == 0.0 ? 0.0 : p.max_abs_imag() / m;
}

/// Largest relative Hermitian-symmetry defect |c(-k) - conj(c(k))| / max|c| of a spectral field,
/// skipping modes whose mirror is the Nyquist alias.
inline double hermitian_defect(const Field& f) {
  f.require(Representation::spectral, "hermitian_defect");
  const auto& g = f.grid();
  const double m = f.max_abs();
  if (m == 0.0) return 0.0;
  double worst = 0.0;
  for_each_mode(g, [&](const Mode& p) {
    if (g.is_nyquist(0, p.ix) || g.is_nyquist(1, p.iy) || g.is_nyquist(2, p.iz)) return;
    const int jx = g.index(0, -g.mode(0, p.ix));
    const int jy = g.index(1, -g.mode(1, p.iy));
    const int jz = g.index(2, -g.mode(2, p.iz));
    worst = std::max(worst, std::abs(f(jx, jy, jz) - std::conj(f[p.flat])));
  });
  return worst / m;
}

}  // namespace zk
