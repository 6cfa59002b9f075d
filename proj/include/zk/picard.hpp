#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "zk/error.hpp"
#include "zk/solver.hpp"
#include "zk/xt_norm.hpp"

namespace zk {

namespace detail {

/// Interaction-picture integrand U(-t) N(u(t)), spectral.
inline Field duhamel_integrand(const NonlinearTerm& n, const Field& frame, double t) {
  return free_propagate(n(forward(frame)), -t);
}

}  // namespace detail

/// -1/2 int_{t0}^{t} U(t - t') d_x(u^2)(t') dt' by the trapezoid rule over the stored
/// frames; a final partial panel interpolates the integrand linearly. Physical output.
inline Field duhamel_apply(const Trajectory& traj, double t, Dealias d = Dealias::two_thirds) {
  if (traj.empty()) throw InvalidArgument("duhamel_apply: empty trajectory");
  const double eps = 1e-12 * std::max(1.0, std::abs(traj.t_end()));
  if (!(t >= traj.t0() - eps && t <= traj.t_end() + eps)) {
    throw InvalidArgument("duhamel_apply: t outside the trajectory span");
  }
  const auto& g = traj.grid();
  const NonlinearTerm n(g, d, 1.0);
  const double h = traj.dt_sample();
  const double pos = std::clamp((t - traj.t0()) / h, 0.0, static_cast<double>(traj.size() - 1));
  const std::size_t full = static_cast<std::size_t>(std::floor(pos + 1e-12));
  const double frac = pos - static_cast<double>(full);
  Field acc(g, Representation::spectral);
  Field prev = detail::duhamel_integrand(n, traj[0], traj.time(0));
  for (std::size_t m = 1; m <= full; ++m) {
    Field cur = detail::duhamel_integrand(n, traj[m], traj.time(m));
    acc += (0.5 * h) * (prev + cur);
    prev = std::move(cur);
  }
  if (frac > 1e-12 && full + 1 < traj.size()) {
    const Field next = detail::duhamel_integrand(n, traj[full + 1], traj.time(full + 1));
    const Field mid = (1.0 - frac) * prev + Complex(frac) * next;
    acc += (0.5 * frac * h) * (prev + mid);
  }
  Field out = inverse(free_propagate(acc, t));
  out.make_real();
  return out;
}

/// Duhamel term at every frame time, accumulated in one pass.
inline Trajectory duhamel_trajectory(const Trajectory& traj, Dealias d = Dealias::two_thirds) {
  if (traj.empty()) throw InvalidArgument("duhamel_trajectory: empty trajectory");
  const auto& g = traj.grid();
  const NonlinearTerm n(g, d, 1.0);
  const double h = traj.dt_sample();
  Trajectory out(g, traj.t0(), h);
  out.alpha = traj.alpha;
  Field acc(g, Representation::spectral);
  Field prev = detail::duhamel_integrand(n, traj[0], traj.time(0));
  out.push_back(Field(g, Representation::physical));
  for (std::size_t m = 1; m < traj.size(); ++m) {
    Field cur = detail::duhamel_integrand(n, traj[m], traj.time(m));
    acc += (0.5 * h) * (prev + cur);
    prev = std::move(cur);
    Field frame = inverse(free_propagate(acc, traj.time(m)));
    frame.make_real();
    out.push_back(std::move(frame));
  }
  return out;
}

/// U(t) u0 sampled on [0, T] with `frames` frames.
inline Trajectory free_trajectory(const Field& u0, double T, std::size_t frames) {
  if (frames < 2) throw InvalidArgument("free_trajectory: need at least two frames");
  const Field s = to_spectral(u0);
  Trajectory out(s.grid(), 0.0, T / static_cast<double>(frames - 1));
  for (std::size_t m = 0; m < frames; ++m) {
    Field p = inverse(free_propagate(s, out.time(m)));
    p.make_real();
    out.push_back(std::move(p));
  }
  return out;
}

/// Frame count for Picard mode: dt * snapshot_every spacing, never fewer than 65 frames.
inline std::size_t picard_frames(const SolverConfig& cfg) {
  const int panels = step_count(cfg.T, cfg.dt * cfg.snapshot_every);
  return static_cast<std::size_t>(std::max(64, panels)) + 1;
}

struct PicardResult {
  std::vector<XtNorm> norms;             ///< ||u^(n)||_{X_T}, n = 0..n_iter
  std::vector<XtNorm> difference_norms;  ///< ||u^(n+1) - u^(n)||_{X_T}, n = 0..n_iter-1
  /// r_n = diff[n] / diff[n-1] for n = 1..n_iter-1; nullopt when 0/0.
  std::vector<std::optional<double>> ratios;
  bool contraction_failure = false;
  std::size_t frames = 0;
  std::optional<Trajectory> last;
  std::vector<Trajectory> iterates;  ///< filled only when requested
};

/// u^(0) = U(t)u0, u^(n+1) = U(t)u0 + Duhamel(u^(n)).
inline PicardResult picard_iterate(const Field& u0, const SolverConfig& cfg, int n_iter, bool keep_iterates = false) {
  cfg.validate();
  if (n_iter < 2) throw InvalidArgument("picard_iterate: n_iter must be >= 2");
  validate_xt_parameters(cfg.flavor, cfg.alpha);
  PicardResult out;
  out.frames = picard_frames(cfg);
  const Trajectory linear = free_trajectory(u0, cfg.T, out.frames);
  Trajectory current = linear;
  current.alpha = cfg.alpha;
  out.norms.push_back(xt_norm(current, cfg.flavor, cfg.alpha));
  if (keep_iterates) out.iterates.push_back(current);
  int diverging = 0;
  for (int it = 0; it < n_iter; ++it) {
    const Trajectory duhamel = duhamel_trajectory(current, cfg.dealias);
    Trajectory next(linear.grid(), linear.t0(), linear.dt_sample());
    next.alpha = cfg.alpha;
    for (std::size_t m = 0; m < linear.size(); ++m) {
      Field f = linear[m];
      Field d = duhamel[m];
      d *= Complex(cfg.nonlinearity);
      f += d;
      next.push_back(std::move(f));
    }
    out.difference_norms.push_back(xt_norm(difference(next, current), cfg.flavor, cfg.alpha));
    out.norms.push_back(xt_norm(next, cfg.flavor, cfg.alpha));
    if (it >= 1) {
      const double a = out.difference_norms[it].total;
      const double b = out.difference_norms[it - 1].total;
      if (b == 0.0) {
        out.ratios.push_back(std::nullopt);
      } else {
        const double r = a / b;
        out.ratios.push_back(r);
        diverging = r > 10.0 ? diverging + 1 : 0;
        if (diverging >= 2) out.contraction_failure = true;
      }
    }
    if (keep_iterates) out.iterates.push_back(next);
    current = std::move(next);
    if (out.contraction_failure) break;
  }
  out.last = std::move(current);
  return out;
}

/// sup_t ||u(t) - v(t)||_{L2} / ||u0 - v0||_{L2}; nullopt if the data coincide.
inline std::optional<double> lipschitz_probe(const Field& u0, const Field& v0, const SolverConfig& cfg) {
  const Field du = to_physical(u0) - to_physical(v0);
  const double d0 = l2_norm(du);
  if (d0 == 0.0) return std::nullopt;
  const SolveResult a = solve(u0, cfg);
  const SolveResult b = solve(v0, cfg);
  double sup = 0.0;
  for (std::size_t m = 0; m < a.trajectory.size(); ++m) sup = std::max(sup, l2_norm(a.trajectory[m] - b.trajectory[m]));
  return sup / d0;
}

}  // namespace zk
