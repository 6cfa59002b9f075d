#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/mixed_norm.hpp"
#include "zk/projection.hpp"
#include "zk/trajectory.hpp"

namespace zk {

/// Which resolution space: the Besov-level X_T or the Sobolev-level X_T^s.
struct XtFlavor {
  enum class Kind { besov, sobolev } kind = Kind::besov;
  double s = 1.0;        ///< Sobolev index (sobolev only), s > 1
  double epsilon = 0.0;  ///< 0 < epsilon < s - 1 (sobolev only)

  static XtFlavor besov() { return {}; }
  static XtFlavor sobolev(double s, double epsilon) { return {Kind::sobolev, s, epsilon}; }
  std::string name() const { return kind == Kind::besov ? "besov" : "sobolev"; }
};

/// Per-shell mixed norms of a trajectory: energy L^inf_T L^2, smoothing
/// L^inf_x L^2_{yzT}, maximal L^2_x L^inf_{yzT}. Index 0 is P_0, index k+1 is Delta_k.
struct ShellNorms {
  std::vector<double> energy;
  std::vector<double> smoothing;
  std::vector<double> maximal;
  int truncation_index = -1;
};

/// Computes all shell norms in one pass over the frames (one forward FFT per
/// frame, one inverse per shell). `maximal_weight` applies |t|^alpha to the
/// Delta_k maximal norms; P_0 is never weighted.
inline ShellNorms shell_mixed_norms(const Trajectory& traj, std::optional<double> maximal_weight) {
  if (traj.empty()) throw InvalidArgument("shell_mixed_norms: empty trajectory");
  const auto& g = traj.grid();
  ShellNorms out;
  out.truncation_index = max_shell(g);
  const int shells = out.truncation_index + 2;
  std::vector<Mask> masks;
  masks.push_back(projector_mask(g, Projector::P, 0));
  for (int k = 0; k <= out.truncation_index; ++k) masks.push_back(projector_mask(g, Projector::Delta, k));
  std::vector<MixedNormAccumulator> energy, smoothing, maximal;
  for (int j = 0; j < shells; ++j) {
    energy.emplace_back(g, energy_norm_spec(), traj.dt_sample());
    smoothing.emplace_back(g, smoothing_norm_spec(), traj.dt_sample());
    maximal.emplace_back(g, maximal_norm_spec(j == 0 ? std::nullopt : maximal_weight), traj.dt_sample());
  }
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const Field spec = forward(traj[m]);
    const double t = traj.time(m);
    for (int j = 0; j < shells; ++j) {
      Field s = spec;
      auto d = s.data();
      const auto& mk = *masks[j];
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= mk[i];
      const Field p = inverse(std::move(s));
      energy[j].add(p, t);
      smoothing[j].add(p, t);
      maximal[j].add(p, t);
    }
  }
  for (int j = 0; j < shells; ++j) {
    out.energy.push_back(energy[j].value());
    out.smoothing.push_back(smoothing[j].value());
    out.maximal.push_back(maximal[j].value());
  }
  return out;
}

struct XtNorm {
  double N = 0.0;
  double T = 0.0;
  double M = 0.0;
  double total = 0.0;
  int truncation_index = -1;
  ShellNorms shells;
};

inline void validate_xt_parameters(const XtFlavor& flavor, double alpha) {
  if (!(alpha >= 0.375 && alpha < 0.5)) {
    throw InvalidArgument("xt_norm: alpha must satisfy 3/8 <= alpha < 1/2, got " + std::to_string(alpha));
  }
  if (flavor.kind == XtFlavor::Kind::sobolev && !(flavor.epsilon > 0.0 && flavor.epsilon < flavor.s - 1.0)) {
    throw InvalidArgument("xt_norm: Sobolev flavour needs 0 < epsilon < s - 1");
  }
}

/// Combines shell norms into the X_T (or X_T^s) components N, T, M.
inline XtNorm combine_xt(ShellNorms shells, const XtFlavor& flavor) {
  XtNorm out;
  out.truncation_index = shells.truncation_index;
  const std::size_t n = shells.energy.size();
  if (flavor.kind == XtFlavor::Kind::besov) {
    out.N = shells.energy[0];
    out.T = shells.smoothing[0];
    out.M = shells.maximal[0];
    for (std::size_t j = 1; j < n; ++j) {
      const double k = static_cast<double>(j - 1);
      out.N += std::exp2(k) * shells.energy[j];
      out.T += std::exp2(2.0 * k) * shells.smoothing[j];
      out.M += shells.maximal[j];
    }
  } else {
    const double s = flavor.s;
    double sn = 0.0, st = 0.0, sm = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double k = static_cast<double>(j - 1);
      sn += std::exp2(2.0 * s * k) * shells.energy[j] * shells.energy[j];
      st += std::exp2(2.0 * (s + 1.0) * k) * shells.smoothing[j] * shells.smoothing[j];
      sm += std::exp2(2.0 * (s - 1.0 - flavor.epsilon) * k) * shells.maximal[j] * shells.maximal[j];
    }
    out.N = shells.energy[0] + std::sqrt(sn);
    out.T = shells.smoothing[0] + std::sqrt(st);
    out.M = shells.maximal[0] + std::sqrt(sm);
  }
  out.total = out.N + out.T + out.M;
  out.shells = std::move(shells);
  return out;
}

/// ||u||_{X_T} = N(u) + T(u) + M(u). The Besov flavour weights the Delta_k
/// maximal norms by t^alpha; the Sobolev flavour uses the unweighted maximal norms.
inline XtNorm xt_norm(const Trajectory& traj, const XtFlavor& flavor, double alpha) {
  validate_xt_parameters(flavor, alpha);
  const std::optional<double> weight =
      flavor.kind == XtFlavor::Kind::besov ? std::optional<double>(alpha) : std::nullopt;
  return combine_xt(shell_mixed_norms(traj, weight), flavor);
}

}  // namespace zk
