#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/spectral.hpp"
#include "zk/summation.hpp"
#include "zk/trajectory.hpp"
#include "zk/xt_norm.hpp"

namespace zk {

enum class Dealias { two_thirds, none };

inline const char* to_string(Dealias d) { return d == Dealias::two_thirds ? "two_thirds" : "none"; }

struct SolverConfig {
  double dt = 1e-3;
  double T = 1.0;
  Dealias dealias = Dealias::two_thirds;
  int snapshot_every = 1;
  double alpha = 0.375;
  XtFlavor flavor = XtFlavor::besov();
  /// Coefficient in front of u u_x; 0 turns the solver into the free propagator.
  double nonlinearity = 1.0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("SolverConfig: dt must be > 0");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("SolverConfig: T must be > 0");
    if (snapshot_every < 1) throw InvalidArgument("SolverConfig: snapshot_every must be >= 1");
  }
};

/// Step size suggested for a grid and an amplitude bound. The linear part is
/// handled exactly, so only the advective limit dx / max|u| remains.
inline double suggested_dt(const FourierGrid& g, double max_amplitude) {
  const double dx = std::min({g.spacing(0), g.spacing(1), g.spacing(2)});
  return 0.5 * dx / (1.0 + max_amplitude);
}

/// 1 where all three integer wavenumbers satisfy |m| < n/3, else 0.
inline std::vector<double> dealias_mask(const FourierGrid& g, Dealias d) {
  std::vector<double> mask(g.size(), 1.0);
  if (d == Dealias::none) return mask;
  for_each_mode(g, [&](const Mode& m) {
    const bool keep = 3 * std::abs(g.mode(0, m.ix)) < g.n(0) && 3 * std::abs(g.mode(1, m.iy)) < g.n(1) &&
                      3 * std::abs(g.mode(2, m.iz)) < g.n(2);
    mask[m.flat] = keep ? 1.0 : 0.0;
  });
  return mask;
}

/// Spectral form of the nonlinear term: -(c/2) d_x (P u)^2, projected with P.
class NonlinearTerm {
 public:
  NonlinearTerm(const FourierGrid& g, Dealias d, double coefficient) : grid_(g), mask_(dealias_mask(g, d)) {
    factor_.resize(g.size());
    for_each_mode(g, [&](const Mode& m) {
      factor_[m.flat] = Complex(0.0, -0.5 * coefficient * g.odd_frequency(0, m.ix)) * mask_[m.flat];
    });
  }

  /// Takes and returns spectral fields.
  Field operator()(const Field& u_hat) const {
    u_hat.require(Representation::spectral, "nonlinear_term");
    Field s = u_hat;
    auto d = s.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= mask_[i];
    Field p = inverse(std::move(s));
    for (auto& v : p.data()) v = v.real() * v.real();
    Field out = forward(std::move(p));
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] *= factor_[i];
    return out;
  }

  const std::vector<double>& mask() const { return mask_; }
  const FourierGrid& grid() const { return grid_; }

 private:
  FourierGrid grid_;
  std::vector<double> mask_;
  std::vector<Complex> factor_;
};

/// -1/2 d_x(u^2) with the 2/3 rule, returned in the input representation.
inline Field nonlinear_term(const Field& u, Dealias d = Dealias::two_thirds) {
  const NonlinearTerm n(u.grid(), d, 1.0);
  return to_rep(n(to_spectral(u)), u.rep());
}

/// Integrating-factor RK4 for the interaction variable w = U(-t) u.
class Ifrk4Stepper {
 public:
  Ifrk4Stepper(const FourierGrid& g, double dt, Dealias d, double coefficient)
      : dt_(dt), nonlinear_(g, d, coefficient) {
    if (!(dt > 0.0 || dt < 0.0) || !std::isfinite(dt)) throw InvalidArgument("step_ifrk4: dt must be nonzero and finite");
    full_.resize(g.size());
    half_.resize(g.size());
    for_each_mode(g, [&](const Mode& m) {
      const double w = lattice_omega(g, m);
      full_[m.flat] = std::polar(1.0, dt * w);
      half_[m.flat] = std::polar(1.0, 0.5 * dt * w);
    });
  }

  double dt() const { return dt_; }

  /// One step on a spectral state; `t` is only used to label a blow-up.
  Field step(const Field& u, double t = 0.0) const {
    u.require(Representation::spectral, "step_ifrk4");
    const double h = dt_;
    const std::size_t n = u.size();
    const auto ud = u.data();

    const Field k1 = nonlinear_(u);
    Field a(u.grid(), Representation::spectral);
    {
      auto ad = a.data();
      const auto k = k1.data();
      for (std::size_t i = 0; i < n; ++i) ad[i] = half_[i] * (ud[i] + 0.5 * h * k[i]);
    }
    const Field k2 = nonlinear_(a);
    {
      auto ad = a.data();
      const auto k = k2.data();
      for (std::size_t i = 0; i < n; ++i) ad[i] = half_[i] * ud[i] + 0.5 * h * k[i];
    }
    const Field k3 = nonlinear_(a);
    {
      auto ad = a.data();
      const auto k = k3.data();
      for (std::size_t i = 0; i < n; ++i) ad[i] = full_[i] * ud[i] + h * half_[i] * k[i];
    }
    const Field k4 = nonlinear_(a);
    Field out(u.grid(), Representation::spectral);
    auto od = out.data();
    const auto c1 = k1.data(), c2 = k2.data(), c3 = k3.data(), c4 = k4.data();
    for (std::size_t i = 0; i < n; ++i) {
      od[i] = full_[i] * ud[i] +
              (h / 6.0) * (full_[i] * c1[i] + 2.0 * half_[i] * (c2[i] + c3[i]) + c4[i]);
    }
    if (!out.all_finite()) throw BlowUp("step_ifrk4: non-finite values", t + h);
    return out;
  }

 private:
  double dt_;
  NonlinearTerm nonlinear_;
  std::vector<Complex> full_;
  std::vector<Complex> half_;
};

/// One IFRK4 step of u_t + Lap u_x + c u u_x = 0; returns the input representation.
inline Field step_ifrk4(const Field& u, double dt, Dealias d = Dealias::two_thirds, double coefficient = 1.0) {
  const Ifrk4Stepper s(u.grid(), dt, d, coefficient);
  return to_rep(s.step(to_spectral(u)), u.rep());
}

/// Mass and Hamiltonians of a spectral state.
struct Invariants {
  double N = 0.0;            ///< sum u^2 dV
  double H = 0.0;            ///< 1/2 sum (|grad u|^2 - (P u)^3 / 3) dV
  double H_quadratic = 0.0;  ///< 1/2 sum (|grad u|^2 - u^2 / 3) dV, as displayed in the source
};

inline Invariants invariants(const Field& u_hat, const std::vector<double>& dealias) {
  u_hat.require(Representation::spectral, "invariants");
  const auto& g = u_hat.grid();
  const auto d = u_hat.data();
  std::vector<double> mass(d.size()), grad(d.size());
  for_each_mode(g, [&](const Mode& m) {
    const double a = std::norm(d[m.flat]);
    mass[m.flat] = a;
    grad[m.flat] = (m.xi * m.xi + m.eta * m.eta + m.mu * m.mu) * a;
  });
  const double dvh = g.dual_cell_volume();
  Invariants out;
  out.N = pairwise_sum(mass) * dvh;
  const double gradient_sq = pairwise_sum(grad) * dvh;
  Field s = u_hat;
  auto sd = s.data();
  for (std::size_t i = 0; i < sd.size(); ++i) sd[i] *= dealias[i];
  const Field p = inverse(std::move(s));
  const auto pd = p.data();
  const double cubic =
      pairwise_sum_of(0, pd.size(), [&](std::size_t i) { return pd[i].real() * pd[i].real() * pd[i].real(); }) *
      g.cell_volume();
  out.H = 0.5 * (gradient_sq - cubic / 3.0);
  out.H_quadratic = 0.5 * (gradient_sq - out.N / 3.0);
  return out;
}

struct ConservedDiagnostics {
  std::vector<double> times;
  std::vector<double> N_values;
  std::vector<double> H_values;
  std::vector<double> H_quadratic_values;

  static double relative(double v, double v0) { return v0 == 0.0 ? std::abs(v) : std::abs(v - v0) / std::abs(v0); }
  double N_drift(std::size_t i) const { return relative(N_values[i], N_values[0]); }
  double H_drift(std::size_t i) const { return relative(H_values[i], H_values[0]); }
  double max_N_drift() const {
    double m = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) m = std::max(m, N_drift(i));
    return m;
  }
  double max_H_drift() const {
    double m = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) m = std::max(m, H_drift(i));
    return m;
  }
};

struct SolveResult {
  Trajectory trajectory;
  ConservedDiagnostics diagnostics;
  int steps = 0;
  double dt = 0.0;  ///< step actually used (T divided into whole steps)
};

/// Number of whole steps covering [0, T] with step no larger than dt.
inline int step_count(double T, double dt) {
  const double r = T / dt;
  const double nearest = std::round(r);
  return std::max(1, static_cast<int>(std::abs(r - nearest) < 1e-9 * std::max(1.0, r) ? nearest : std::ceil(r)));
}

/// Integrates from t = 0 to cfg.T. Frames are stored every snapshot_every steps.
inline SolveResult solve(const Field& u0, const SolverConfig& cfg) {
  cfg.validate();
  Field u = to_spectral(u0);
  if (imaginary_residue(u0) > 1e-10) throw InvalidArgument("solve: initial data must be real");
  const int steps = step_count(cfg.T, cfg.dt);
  const double dt = cfg.T / steps;
  const Ifrk4Stepper stepper(u.grid(), dt, cfg.dealias, cfg.nonlinearity);
  const auto mask = dealias_mask(u.grid(), cfg.dealias);
  SolveResult out{Trajectory(u.grid(), 0.0, dt * cfg.snapshot_every), {}, steps, dt};
  out.trajectory.alpha = cfg.alpha;
  auto record = [&](const Field& s, double t) {
    Field p = inverse(s);
    p.make_real();
    out.trajectory.push_back(std::move(p));
    const Invariants inv = invariants(s, mask);
    out.diagnostics.times.push_back(t);
    out.diagnostics.N_values.push_back(inv.N);
    out.diagnostics.H_values.push_back(inv.H);
    out.diagnostics.H_quadratic_values.push_back(inv.H_quadratic);
  };
  record(u, 0.0);
  for (int s = 1; s <= steps; ++s) {
    u = stepper.step(u, (s - 1) * dt);
    if (s % cfg.snapshot_every == 0) record(u, s * dt);
  }
  return out;
}

/// Final state only, no frames kept.
inline Field evolve(const Field& u0, double T, double dt, Dealias d = Dealias::two_thirds, double coefficient = 1.0) {
  if (T == 0.0) return u0;
  const int steps = step_count(std::abs(T), std::abs(dt));
  const double h = std::copysign(std::abs(T) / steps, T);
  const Ifrk4Stepper stepper(u0.grid(), h, d, coefficient);
  Field u = to_spectral(u0);
  for (int s = 0; s < steps; ++s) u = stepper.step(u, s * h);
  return to_rep(std::move(u), u0.rep());
}

}  // namespace zk
