#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/initial_data.hpp"
#include "zk/mixed_norm.hpp"
#include "zk/norms.hpp"
#include "zk/oscillatory.hpp"
#include "zk/projection.hpp"
#include "zk/random.hpp"
#include "zk/report.hpp"
#include "zk/spectral.hpp"

namespace zk {

namespace detail {

/// Unitarity cross-check: physical-space ||U(t) phi|| against ||phi||, relative. Measured
/// after the inverse transform, since the spectral norm of a phase-multiplied field is
/// unchanged to the last bit and would hide nothing.
inline double unitarity_drift(const Field& phi_hat, double t) {
  const double a = l2_norm(inverse(phi_hat));
  if (a == 0.0) return 0.0;
  return std::abs(l2_norm(inverse(free_propagate(phi_hat, t))) - a) / a;
}

inline std::uint64_t trial_seed(std::uint64_t seed, int k, int trial) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(k) * 0x1000193ULL + static_cast<std::uint64_t>(trial)));
}

/// Streams |U(t) phi| for t = t0 + j dt, j < n_t, into the given accumulators.
template <class... Acc>
void stream_free_evolution(const Field& phi_hat, double t0, double dt, int n_t, Acc&... acc) {
  FreeEvolution ev(phi_hat, t0, dt);
  for (int j = 0; j < n_t; ++j) {
    if (j > 0) ev.advance();
    const Field u = inverse(ev.state());
    (acc.add(u, ev.time()), ...);
  }
}

}  // namespace detail

// ---------------------------------------------------------------- Kato smoothing

struct KatoResult {
  double ratio = 0.0;                ///< ||grad U phi||_{L^inf_x L^2_{yzt}} / ||phi||
  std::vector<double> profile;       ///< ||U(.) phi(x, ., .)||_{L^2_{yzt}} per x node
  double cv = 0.0;                   ///< coefficient of variation of the profile across x
  double identity_value = 0.0;       ///< || |h'|^{-1/2} phi_hat ||, h' = 3 xi^2 + eta^2 + mu^2
  double identity_ratio = 0.0;       ///< mean profile / identity_value
  double window = 0.0;
  int n_t = 0;
  double unitarity_drift = 0.0;
};

/// Largest |omega(p) - omega(q)| over the spectral support of phi.
inline double omega_span(const Field& phi_hat) {
  const auto& g = phi_hat.grid();
  const double cutoff = 1e-14 * phi_hat.max_abs();
  double lo = INFINITY, hi = -INFINITY;
  for_each_mode(g, [&](const Mode& m) {
    if (std::abs(phi_hat[m.flat]) <= cutoff) return;
    const double w = lattice_omega(g, m);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  });
  return hi >= lo ? hi - lo : 0.0;
}

/// Time samples needed so that every frequency difference stays below pi per step.
inline int kato_default_samples(const Field& phi_hat, double window) {
  const double span = omega_span(phi_hat);
  return std::max(16, static_cast<int>(std::ceil(window * span / std::numbers::pi)) + 1);
}

/// Evaluates the smoothing quantities over t in [-window/2, window/2) with n_t samples
/// (n_t <= 0 picks kato_default_samples).
inline KatoResult kato_smoothing(const Field& phi, double window, int n_t = 0) {
  if (!(window > 0.0)) throw InvalidArgument("kato_smoothing: window must be > 0");
  const Field s = to_spectral(phi);
  const auto& g = s.grid();
  const double norm = l2_norm(s);
  if (std::abs(s[0]) * std::sqrt(g.dual_cell_volume()) > 1e-10 * norm) {
    throw SingularMultiplier("kato_smoothing: phi must have zero mean (|h'|^{-1/2} is singular at the origin)");
  }
  KatoResult out;
  out.window = window;
  out.n_t = n_t > 0 ? n_t : kato_default_samples(s, window);
  out.profile.assign(g.n(0), 0.0);
  if (norm == 0.0) return out;
  const double dt = window / out.n_t;
  const double t0 = -0.5 * window;
  MixedNormAccumulator plain(g, smoothing_norm_spec(), dt);
  std::array<MixedNormAccumulator, 3> parts{MixedNormAccumulator(g, smoothing_norm_spec(), dt),
                                            MixedNormAccumulator(g, smoothing_norm_spec(), dt),
                                            MixedNormAccumulator(g, smoothing_norm_spec(), dt)};
  FreeEvolution ev(s, t0, dt);
  for (int j = 0; j < out.n_t; ++j) {
    if (j > 0) ev.advance();
    const double t = ev.time();
    plain.add(inverse(ev.state()), t);
    for (int a = 0; a < 3; ++a) parts[a].add(inverse(derivative(ev.state(), a)), t);
  }
  out.profile = plain.inner_profile();
  std::array<std::vector<double>, 3> gp{parts[0].inner_profile(), parts[1].inner_profile(), parts[2].inner_profile()};
  double sup = 0.0;
  for (int i = 0; i < g.n(0); ++i) {
    sup = std::max(sup, std::sqrt(gp[0][i] * gp[0][i] + gp[1][i] * gp[1][i] + gp[2][i] * gp[2][i]));
  }
  out.ratio = sup / norm;
  double mean = 0.0;
  for (double v : out.profile) mean += v;
  mean /= out.profile.size();
  double var = 0.0;
  for (double v : out.profile) var += (v - mean) * (v - mean);
  var /= out.profile.size();
  out.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  std::vector<double> terms(s.size(), 0.0);
  for_each_mode(g, [&](const Mode& m) {
    const double h = 3.0 * m.xi * m.xi + m.eta * m.eta + m.mu * m.mu;
    if (h > 0.0) terms[m.flat] = std::norm(s[m.flat]) / h;
  });
  out.identity_value = std::sqrt(pairwise_sum(terms) * g.dual_cell_volume());
  out.identity_ratio = out.identity_value > 0.0 ? mean / out.identity_value : 0.0;
  out.unitarity_drift = detail::unitarity_drift(s, 0.5 * window);
  return out;
}

/// Window-doubling study: CV across x for windows w0 * 2^m, m = 0..doublings. Passes when
/// the CV decreases strictly at every doubling.
inline EstimateReport kato_smoothing_check(const Field& phi, double w0, int doublings = 4, int n_t = 0) {
  EstimateReport r;
  r.name = "kato_smoothing";
  r.set("window0", w0);
  r.set("doublings", static_cast<double>(doublings));
  r.set("grid", phi.grid().id());
  double prev = INFINITY;
  bool monotone = true;
  double worst_drift = 0.0;
  for (int m = 0; m <= doublings; ++m) {
    const double w = std::ldexp(w0, m);
    const int samples = n_t > 0 ? std::max(16, n_t << m) : 0;
    const KatoResult k = kato_smoothing(phi, w, samples);
    r.samples.push_back({m, 0, k.cv});
    r.metrics["ratio_w" + std::to_string(m)] = k.ratio;
    r.metrics["identity_ratio_w" + std::to_string(m)] = k.identity_ratio;
    r.metrics["n_t_w" + std::to_string(m)] = k.n_t;
    worst_drift = std::max(worst_drift, k.unitarity_drift);
    if (!(k.cv < prev)) monotone = m == 0 ? monotone : false;
    prev = k.cv;
    if (l2_norm(phi) == 0.0) break;
  }
  r.metrics["unitarity_drift"] = worst_drift;
  if (l2_norm(phi) == 0.0) {
    r.verdict = Verdict::skip;
    r.reason = "phi = 0";
    return r;
  }
  r.verdict = Verdict::pass;
  if (!monotone) r.fail("coefficient of variation is not decreasing under window doubling");
  if (worst_drift > 1e-10) r.fail("unitarity drift above 1e-10");
  return r;
}

// ---------------------------------------------------------------- maximal estimate

enum class ShellData { gaussian, focusing };

struct MaximalOptions {
  int n = 48;
  int n_t = 65;
  std::uint64_t seed = 1;
  ShellData data = ShellData::gaussian;
  bool exploratory = false;  ///< allow alpha < 3/8
  double spread_tolerance = 4.0;
  double slope_tolerance = 0.3;
};

/// Grid for shell k: per-axis Nyquist 2^{k+2}, the outer edge of supp delta_k.
inline FourierGrid maximal_grid(int n, int k) { return make_grid(n, std::numbers::pi * n / std::ldexp(4.0, k)); }

/// ||t^alpha Delta_k U(t) phi||_{L^2_x L^inf_{yzT}} / (2^k ||Delta_k phi||), or nullopt when Delta_k phi = 0.
inline std::optional<double> maximal_ratio_for(const Field& phi, int k, double alpha, double T, int n_t,
                                               double* drift = nullptr) {
  const Field s = project(to_spectral(phi), Projector::Delta, k);
  const double norm = l2_norm(s);
  if (norm == 0.0) return std::nullopt;
  const double dt = T / (n_t - 1);
  MixedNormAccumulator acc(s.grid(), maximal_norm_spec(alpha), dt);
  detail::stream_free_evolution(s, 0.0, dt, n_t, acc);
  if (drift != nullptr) *drift = detail::unitarity_drift(s, T);
  return acc.value() / (std::ldexp(1.0, k) * norm);
}

/// ||P_0 U(t) phi||_{L^2_x L^inf_{yzT}} / ||P_0 phi||, or nullopt when P_0 phi = 0.
inline std::optional<double> maximal_ratio_p0(const Field& phi, double T, int n_t) {
  const Field s = project(to_spectral(phi), Projector::P, 0);
  const double norm = l2_norm(s);
  if (norm == 0.0) return std::nullopt;
  const double dt = T / (n_t - 1);
  MixedNormAccumulator acc(s.grid(), maximal_norm_spec(), dt);
  detail::stream_free_evolution(s, 0.0, dt, n_t, acc);
  return acc.value() / norm;
}

inline void check_maximal_parameters(double alpha, double T, bool exploratory) {
  if (!(T > 0.0 && T < 1.0)) throw InvalidArgument("maximal estimate needs 0 < T < 1");
  if (!(alpha >= 0.375) && !exploratory) {
    throw InvalidArgument("maximal estimate needs alpha >= 3/8, got " + format_double(alpha));
  }
  if (!(alpha >= 0.0)) throw InvalidArgument("maximal estimate needs alpha >= 0");
}

/// Max over `trials` random shell-k data of the weighted maximal ratio, for k in [k_min, k_max].
inline EstimateReport maximal_ratio(int k_min, int k_max, double alpha, double T, int trials,
                                    const MaximalOptions& opt = {}) {
  check_maximal_parameters(alpha, T, opt.exploratory);
  if (k_min < 0 || k_max < k_min) throw InvalidArgument("maximal_ratio: need 0 <= k_min <= k_max");
  if (trials < 1 || opt.n_t < 2) throw InvalidArgument("maximal_ratio: need trials >= 1 and n_t >= 2");
  EstimateReport r;
  r.name = "maximal";
  r.set("alpha", alpha);
  r.set("T", T);
  r.set("k_min", static_cast<double>(k_min));
  r.set("k_max", static_cast<double>(k_max));
  r.set("trials", static_cast<double>(trials));
  r.set("n", static_cast<double>(opt.n));
  r.set("n_t", static_cast<double>(opt.n_t));
  r.set("seed", std::to_string(opt.seed));
  r.set("data", opt.data == ShellData::gaussian ? "gaussian" : "focusing");
  double worst_drift = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const FourierGrid g = maximal_grid(opt.n, k);
    double best = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = detail::trial_seed(opt.seed, k, trial);
      Field phi;
      if (opt.data == ShellData::gaussian) {
        phi = random_shell(g, k, seed);
      } else {
        Rng rng(seed);
        const std::array<double, 3> x0{(rng.uniform() - 0.5) * g.length(0), (rng.uniform() - 0.5) * g.length(1),
                                       (rng.uniform() - 0.5) * g.length(2)};
        phi = focusing_packet(g, k, x0, T * (0.5 + 0.5 * rng.uniform()));
      }
      double drift = 0.0;
      const auto ratio = maximal_ratio_for(phi, k, alpha, T, opt.n_t, &drift);
      worst_drift = std::max(worst_drift, drift);
      r.samples.push_back({k, trial, ratio.value_or(NAN)});
      if (ratio) best = std::max(best, *ratio);
    }
    r.aggregate.emplace_back(k, best);
  }
  r.metrics["unitarity_drift"] = worst_drift;
  r.fit_slope();
  r.metrics["spread"] = r.aggregate_spread();
  r.verdict = Verdict::pass;
  if (r.fitted_slope && alpha < 0.375) {
    r.flags.push_back("outside proposition hypotheses: alpha < 3/8");
    if (*r.fitted_slope > 0.1) r.flags.push_back("slope > 0.1 with alpha < 3/8");
    r.verdict = Verdict::inconclusive;
    r.reason = "exploratory run outside alpha >= 3/8";
    return r;
  }
  if (worst_drift > 1e-10) r.fail("unitarity drift above 1e-10");
  if (k_max - k_min + 1 < 3) {
    r.verdict = Verdict::inconclusive;
    r.reason = "fewer than three shells, no slope";
    return r;
  }
  if (r.aggregate_spread() > opt.spread_tolerance) r.fail("max ratio spread across k exceeds tolerance");
  if (std::abs(*r.fitted_slope) > opt.slope_tolerance) r.fail("|slope| exceeds tolerance");
  return r;
}

// ---------------------------------------------------------------- sharpness

struct SharpnessOptions {
  int n_x = 48;
  int n_yz = 32;
  int n_t = 65;
};

/// Anisotropic grid for phi_k: box 8 pi 4^k (n_x / 48) in x, 8 pi / 2^k in y and z.
inline FourierGrid sharpness_grid(int k, const SharpnessOptions& opt = {}) {
  const double lx = 8.0 * std::numbers::pi * std::ldexp(1.0, 2 * k) * (opt.n_x / 48.0);
  const double lyz = 8.0 * std::numbers::pi * std::ldexp(1.0, -k);
  return make_grid({opt.n_x, opt.n_yz, opt.n_yz}, {lx, lyz, lyz});
}

/// Throws GridTooCoarse unless g resolves delta_{-2k} in x and delta_k in y, z:
/// Nyquist above the outer edge and at least four lattice points across the inner edge.
inline void require_sharpness_resolution(const FourierGrid& g, int k) {
  const std::array<double, 3> edge{std::ldexp(1.0, -2 * k), std::ldexp(1.0, k), std::ldexp(1.0, k)};
  for (int a = 0; a < 3; ++a) {
    const double need_l = 8.0 * std::numbers::pi / edge[a];  // spacing <= edge / 4
    const double need_nyq = 4.0 * edge[a];
    if (g.length(a) < need_l * (1.0 - 1e-12) || g.nyquist(a) < need_nyq * (1.0 - 1e-12)) {
      const double l = std::max(g.length(a), need_l);
      int n = 8;
      while (n * std::numbers::pi / l < need_nyq) n *= 2;
      throw GridTooCoarse("sharpness_witness: axis " + std::to_string(a) + " needs L >= " + format_double(need_l) +
                          " and n >= " + std::to_string(n) + " (have n = " + std::to_string(g.n(a)) +
                          ", L = " + format_double(g.length(a)) + ")");
    }
  }
}

struct SharpnessSample {
  int k = 0;
  double l2 = 0.0;
  std::vector<std::pair<double, double>> hs;  ///< (s, ||phi_k||_{H^s})
  double M = 0.0;                             ///< ||t^alpha U(t) phi_k||_{L^2_x L^inf_{yzT}}
  double phase_max = 0.0;                     ///< max |y eta + z mu + t omega| on the support
  double phase_bound = 0.0;                   ///< (8 + 2^{6-6k} + 128) eps
  double lower_ratio = 0.0;  ///< (2pi)^{3/2} |U(e) phi_k(0, e 2^-k, e 2^-k)| / ||phi_hat||_{L1}, e = eps_lower
  double lower_floor = 0.0;  ///< cos(max phase at eps_lower), the floor guaranteed when below pi/2
  double unitarity_drift = 0.0;
};

inline SharpnessSample sharpness_witness_on(const FourierGrid& g, int k, const std::vector<double>& s_values,
                                            double eps, double T, double alpha, int n_t,
                                            double eps_lower = 0.005) {
  require_sharpness_resolution(g, k);
  const Field phi = sharpness_phi_k_spectral(g, k);
  SharpnessSample out;
  out.k = k;
  out.l2 = l2_norm(phi);
  for (double s : s_values) out.hs.emplace_back(s, sobolev_norm(phi, s));
  const double dt = T / (n_t - 1);
  MixedNormAccumulator acc(g, maximal_norm_spec(alpha), dt);
  detail::stream_free_evolution(phi, 0.0, dt, n_t, acc);
  out.M = acc.value();
  out.unitarity_drift = detail::unitarity_drift(phi, T);
  // Phase at t = e, y = z = e 2^-k over the support; at e = eps_lower it is small enough
  // that the direct lattice sum at x = 0 keeps a fixed fraction of ||phi_hat||_{L1}.
  const double y = eps * std::ldexp(1.0, -k);
  const double yl = eps_lower * std::ldexp(1.0, -k);
  Complex sum{};
  double l1 = 0.0, lower_phase = 0.0;
  for_each_mode(g, [&](const Mode& m) {
    const double a = phi[m.flat].real();
    if (a <= 0.0) return;
    const double w = lattice_omega(g, m);
    out.phase_max = std::max(out.phase_max, std::abs(y * m.eta + y * m.mu + eps * w));
    const double pl = yl * m.eta + yl * m.mu + eps_lower * w;
    lower_phase = std::max(lower_phase, std::abs(pl));
    sum += a * std::polar(1.0, pl);
    l1 += a;
  });
  out.phase_bound = (8.0 + std::ldexp(1.0, 6 - 6 * k) + 128.0) * eps;
  out.lower_ratio = l1 > 0.0 ? std::abs(sum) / l1 : 0.0;
  out.lower_floor = lower_phase < 0.5 * std::numbers::pi ? std::cos(lower_phase) : 0.0;
  return out;
}

struct SharpnessOptionsFull {
  SharpnessOptions grid;
  std::vector<double> s_values{0.5, 1.0, 1.5};
  double eps = 0.05;
  double eps_lower = 0.005;
  double exponent_tolerance = 0.1;
  double slope_threshold = 0.8;
};

/// phi_k over k in [k_min, k_max]: H^s exponents and the growth of M_k / ||phi_k||.
inline EstimateReport sharpness_witness(int k_min, int k_max, double T, double alpha,
                                        const SharpnessOptionsFull& opt = {}) {
  if (!(T > 0.0 && T < 1.0)) throw InvalidArgument("sharpness_witness: need 0 < T < 1");
  if (k_min < 1 || k_max < k_min) throw InvalidArgument("sharpness_witness: need 1 <= k_min <= k_max");
  EstimateReport r;
  r.name = "sharpness";
  r.set("T", T);
  r.set("alpha", alpha);
  r.set("eps", opt.eps);
  r.set("n_x", static_cast<double>(opt.grid.n_x));
  r.set("n_yz", static_cast<double>(opt.grid.n_yz));
  r.set("n_t", static_cast<double>(opt.grid.n_t));
  std::vector<SharpnessSample> samples;
  for (int k = k_min; k <= k_max; ++k) {
    samples.push_back(
        sharpness_witness_on(sharpness_grid(k, opt.grid), k, opt.s_values, opt.eps, T, alpha, opt.grid.n_t, opt.eps_lower));
    const auto& s = samples.back();
    r.samples.push_back({k, 0, s.M / s.l2});
    r.aggregate.emplace_back(k, s.M / s.l2);
    r.metrics["phase_max_k" + std::to_string(k)] = s.phase_max;
    r.metrics["phase_bound_k" + std::to_string(k)] = s.phase_bound;
    r.metrics["lower_ratio_k" + std::to_string(k)] = s.lower_ratio;
    r.metrics["unitarity_drift_k" + std::to_string(k)] = s.unitarity_drift;
  }
  r.fit_slope();
  r.verdict = Verdict::pass;
  if (!r.fitted_slope) {
    r.verdict = Verdict::inconclusive;
    r.reason = "fewer than three shells, no slope";
  } else if (*r.fitted_slope < opt.slope_threshold) {
    r.fail("growth slope of M_k / ||phi_k|| below threshold");
  }
  if (samples.size() >= 3) {
    for (std::size_t j = 0; j < opt.s_values.size(); ++j) {
      std::vector<double> x, y;
      for (const auto& s : samples) {
        x.push_back(s.k);
        y.push_back(std::log2(s.hs[j].second));
      }
      const double e = ols_slope(x, y);
      const double sv = opt.s_values[j];
      r.metrics["hs_exponent_s" + format_double(sv)] = e;
      std::vector<double> c;
      for (const auto& s : samples) c.push_back(s.hs[j].second / std::exp2(sv * s.k));
      r.metrics["hs_constant_max_s" + format_double(sv)] = *std::max_element(c.begin(), c.end());
      r.metrics["hs_constant_min_s" + format_double(sv)] = *std::min_element(c.begin(), c.end());
      if (std::abs(e - sv) > opt.exponent_tolerance) r.fail("H^s exponent off by more than tolerance at s = " + format_double(sv));
    }
  }
  for (const auto& s : samples) {
    if (s.phase_max > s.phase_bound) r.fail("phase bound violated at k = " + std::to_string(s.k));
    if (s.lower_ratio < s.lower_floor - 1e-12) r.fail("lower-bound mechanism violated at k = " + std::to_string(s.k));
    if (s.unitarity_drift > 1e-10) r.fail("unitarity drift above 1e-10");
  }
  return r;
}

// ---------------------------------------------------------------- H^s maximal estimate

struct HsOptions {
  int n = 32;
  double L = 2.0 * std::numbers::pi;
  int n_t = 65;
  std::uint64_t seed = 7;
  double tolerance = 0.25;
};

/// ||U(t) phi||_{L^2_x L^inf_{yzT}} / ||phi||_{H^s}; nullopt when phi = 0.
inline std::optional<double> hs_maximal_ratio(const Field& phi, double s, double T, int n_t) {
  const Field sp = to_spectral(phi);
  const double den = sobolev_norm(sp, s);
  if (den == 0.0) return std::nullopt;
  const double dt = T / (n_t - 1);
  MixedNormAccumulator acc(sp.grid(), maximal_norm_spec(), dt);
  detail::stream_free_evolution(sp, 0.0, dt, n_t, acc);
  return acc.value() / den;
}

/// Multi-shell datum with grid-independent coefficients and random shell weights; band
/// limited to the largest shell whose support fits under the grid's Nyquist.
inline Field random_multishell(const FourierGrid& g, int shells, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(shells + 1);
  for (auto& v : w) v = std::exp2(4.0 * (rng.uniform() - 0.5));
  const double radius = std::ldexp(4.0, shells - 1);
  return random_bandlimited_spectral(g, radius, seed, [&](double r) {
    double v = w[0] * bump_value(r);
    for (int k = 0; k < shells; ++k) v += w[k + 1] * delta_value(std::ldexp(r, -k));
    return v;
  });
}

inline EstimateReport hs_maximal_check(double s, double T, int trials, const HsOptions& opt = {}) {
  if (!(s > 1.0)) throw InvalidArgument("hs_maximal_check: needs s > 1, got " + format_double(s));
  if (!(T > 0.0 && T < 1.0)) throw InvalidArgument("hs_maximal_check: needs 0 < T < 1");
  if (trials < 1) throw InvalidArgument("hs_maximal_check: trials >= 1");
  EstimateReport r;
  r.name = "hs_maximal";
  r.set("s", s);
  r.set("T", T);
  r.set("trials", static_cast<double>(trials));
  r.set("n", static_cast<double>(opt.n));
  r.set("L", opt.L);
  r.set("n_t", static_cast<double>(opt.n_t));
  r.set("seed", std::to_string(opt.seed));
  const FourierGrid coarse = make_grid(opt.n, opt.L);
  const FourierGrid fine = make_grid(2 * opt.n, opt.L);
  int shells = 0;
  while (std::ldexp(4.0, shells) <= coarse.nyquist(0) * (1.0 + 1e-12)) ++shells;
  r.set("shells", static_cast<double>(shells));
  double best_c = 0.0, best_f = 0.0, lo = INFINITY;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = detail::trial_seed(opt.seed, 0, trial);
    const auto rc = hs_maximal_ratio(random_multishell(coarse, shells, seed), s, T, opt.n_t);
    const auto rf = hs_maximal_ratio(random_multishell(fine, shells, seed), s, T, opt.n_t);
    r.samples.push_back({0, trial, rc.value_or(NAN)});
    r.samples.push_back({1, trial, rf.value_or(NAN)});
    best_c = std::max(best_c, rc.value_or(0.0));
    best_f = std::max(best_f, rf.value_or(0.0));
    lo = std::min(lo, rc.value_or(INFINITY));
  }
  r.aggregate = {{0, best_c}, {1, best_f}};
  const double change = best_c > 0.0 ? best_f / best_c - 1.0 : INFINITY;
  r.metrics["refinement_change"] = change;
  r.metrics["trial_spread"] = best_c / lo;
  r.verdict = Verdict::pass;
  if (!(std::abs(change) <= opt.tolerance)) r.fail("max ratio changes by more than tolerance under refinement");
  return r;
}

// ---------------------------------------------------------------- oscillatory integrals

struct KernelScanOptions {
  int n = 64;
  double box_units = 48.0;  ///< box length in kernel units (2^-k for I_k)
  int n_t = 33;
  double psi_threshold = 1e-3;  ///< support level used for the group-velocity wrap check
};

struct KernelNorm {
  double value = 0.0;              ///< sum over |x| <= extent of sup_{y,z,t} w(t)|I| dx
  double tail = 0.0;               ///< 4 s(X) X, s(X) the profile at the edge
  double max_group_shift = 0.0;    ///< v_max T
  bool wrap = false;
  bool tail_dominant = false;
  std::vector<double> profile;     ///< per-x sup, grid order
};

/// L^1_x L^inf_{yzT} norm of (t^{2 alpha}) I(t, x) over |x| <= x_extent kernel units.
inline KernelNorm kernel_norm(const OscillatoryKernel& K, double T, std::optional<double> weight_alpha,
                              double x_extent, const KernelScanOptions& opt,
                              std::optional<FourierGrid> grid_override = std::nullopt) {
  if (!(T > 0.0)) throw InvalidArgument("kernel_norm: T must be > 0");
  const FourierGrid g = grid_override ? *grid_override : make_grid(opt.n, opt.box_units * K.unit());
  const Field psi = kernel_symbol(K, g);
  KernelNorm out;
  double vmax = 0.0;
  const double pmax = psi.max_abs();
  for_each_mode(g, [&](const Mode& m) {
    if (std::abs(psi[m.flat]) < opt.psi_threshold * pmax) return;
    const double vx = 3.0 * m.xi * m.xi + m.eta * m.eta + m.mu * m.mu;
    const double vy = 2.0 * m.xi * m.eta, vz = 2.0 * m.xi * m.mu;
    vmax = std::max(vmax, std::sqrt(vx * vx + vy * vy + vz * vz));
  });
  out.max_group_shift = vmax * T;
  out.wrap = out.max_group_shift > 0.5 * std::min({g.length(0), g.length(1), g.length(2)});
  const double dt = T / (opt.n_t - 1);
  const std::optional<double> w = weight_alpha ? std::optional<double>(2.0 * *weight_alpha) : std::nullopt;
  MixedNormAccumulator acc(g, kernel_norm_spec(w), dt);
  for (int j = 0; j < opt.n_t; ++j) acc.add(oscillatory_fft(psi, j * dt), j * dt);
  out.profile = acc.inner_profile();
  const double X = x_extent * K.unit();
  CompensatedSum sum;
  double edge = 0.0;
  const double dx = g.spacing(0);
  for (int i = 0; i < g.n(0); ++i) {
    const double x = std::abs(g.coordinate(0, i));
    if (x > X + 1e-12 * X) continue;
    sum.add(out.profile[i] * dx);
    if (x > X - dx * (1.0 + 1e-12)) edge = std::max(edge, out.profile[i]);
  }
  out.value = sum.value();
  out.tail = 4.0 * edge * X;
  out.tail_dominant = out.tail > 0.05 * out.value;
  return out;
}

struct IkScanOptions {
  KernelScanOptions scan;
  std::vector<int> axes{0, 1, 2};
  std::vector<int> k_values{1, 2, 3, 4};
  bool weighted = true;
  double slope_max = 2.3;  ///< 2.5 for unweighted scans
};

/// ||t^{2 alpha} I_k||_{L^1_x L^inf_{yzT}} for each axis variant; the slope per axis is fitted
/// and the largest reported.
inline EstimateReport ik_norm_scan(double alpha, double T, double x_extent, const IkScanOptions& opt = {}) {
  if (opt.weighted && !(alpha >= 0.375)) throw InvalidArgument("ik_norm_scan: weighted scan needs alpha >= 3/8");
  EstimateReport r;
  r.name = opt.weighted ? "ik_weighted" : "ik_unweighted";
  r.set("alpha", alpha);
  r.set("T", T);
  r.set("x_extent", x_extent);
  r.set("n", static_cast<double>(opt.scan.n));
  r.set("box_units", opt.scan.box_units);
  r.set("n_t", static_cast<double>(opt.scan.n_t));
  r.verdict = Verdict::pass;
  double worst = -INFINITY;
  for (int axis : opt.axes) {
    std::vector<double> x, y;
    for (int k : opt.k_values) {
      const auto K = OscillatoryKernel::ik(axis, k);
      const auto norm = kernel_norm(K, T, opt.weighted ? std::optional<double>(alpha) : std::nullopt, x_extent, opt.scan);
      r.samples.push_back({k, axis, norm.value});
      x.push_back(k);
      y.push_back(std::log2(norm.value));
      r.metrics["tail_fraction_" + K.name()] = norm.tail / norm.value;
      r.metrics["group_shift_" + K.name()] = norm.max_group_shift;
      if (norm.wrap) r.flags.push_back("wrap: " + K.name() + " disperses past half the box");
      if (norm.tail_dominant) r.flags.push_back("tail: " + K.name() + " exceeds 5% of the accumulated integral");
    }
    if (x.size() >= 3) {
      const double sl = ols_slope(x, y);
      r.metrics["slope_axis" + std::to_string(axis)] = sl;
      worst = std::max(worst, sl);
    }
  }
  if (worst == -INFINITY) {
    r.verdict = Verdict::inconclusive;
    r.reason = "fewer than three shells, no slope";
    return r;
  }
  r.fitted_slope = worst;
  for (int k : opt.k_values) {
    double m = 0.0;
    for (const auto& s : r.samples)
      if (s.k == k) m = std::max(m, s.ratio);
    r.aggregate.emplace_back(k, m);
  }
  if (worst > opt.slope_max) r.fail("growth slope exceeds " + format_double(opt.slope_max));
  if (r.verdict == Verdict::pass && !r.flags.empty()) {
    r.verdict = Verdict::inconclusive;
    r.reason = "scan flagged; see flags";
  }
  return r;
}

struct I0ScanOptions {
  int n = 64;
  double L = 64.0;
  int n_t = 33;
  double tolerance = 0.2;
};

/// ||I_0||_{L^1_x L^inf_{yzT}} at x_extent and 2 x_extent; passes when they agree within tolerance.
inline EstimateReport i0_norm_scan(double T, double x_extent, const I0ScanOptions& opt = {}) {
  if (!(2.0 * x_extent <= 0.5 * opt.L * (1.0 + 1e-12))) {
    throw InvalidArgument("i0_norm_scan: 2 x_extent must fit in half the box");
  }
  EstimateReport r;
  r.name = "i0";
  r.set("T", T);
  r.set("x_extent", x_extent);
  r.set("n", static_cast<double>(opt.n));
  r.set("L", opt.L);
  r.set("n_t", static_cast<double>(opt.n_t));
  KernelScanOptions so;
  so.n = opt.n;
  so.n_t = opt.n_t;
  so.box_units = opt.L;
  const auto K = OscillatoryKernel::i0();
  const auto a = kernel_norm(K, T, std::nullopt, x_extent, so);
  const auto b = kernel_norm(K, T, std::nullopt, 2.0 * x_extent, so);
  r.samples = {{0, 0, a.value}, {0, 1, b.value}};
  r.aggregate = {{0, a.value}, {1, b.value}};
  const double change = b.value / a.value - 1.0;
  r.metrics["change"] = change;
  r.metrics["group_shift"] = a.max_group_shift;
  r.verdict = Verdict::pass;
  if (a.wrap) r.flags.push_back("wrap: I0 disperses past half the box");
  if (!(std::abs(change) <= opt.tolerance)) r.fail("value changes by more than tolerance when x_extent doubles");
  if (r.verdict == Verdict::pass && !r.flags.empty()) r.verdict = Verdict::inconclusive;
  return r;
}

struct SpotCheckOptions {
  int spots = 10;
  double t_max = 2.5e-5;      ///< for I_k; I_0 uses t_max_i0
  double t_max_i0 = 0.1;
  double x_radius_units = 4.0;
  double box_units = 192.0;
  double tolerance = 1e-6;
  std::uint64_t seed = 11;
};

/// FFT mode against adaptive quadrature at random (t, x) nodes, for I_0 and I_k (given axis, k).
inline EstimateReport oscillatory_spot_checks(const std::vector<OscillatoryKernel>& kernels,
                                              const SpotCheckOptions& opt = {}) {
  EstimateReport r;
  r.name = "oscillatory_spot_checks";
  r.set("spots", static_cast<double>(opt.spots));
  r.set("box_units", opt.box_units);
  r.set("tolerance", opt.tolerance);
  r.verdict = Verdict::pass;
  double worst = 0.0;
  for (const auto& K : kernels) {
    const FourierGrid g = padded_kernel_grid(K, opt.box_units);
    const Field psi = kernel_symbol(K, g);
    Rng rng(mix64(opt.seed ^ static_cast<std::uint64_t>(K.k * 8 + K.axis + (K.kind == OscillatoryKernel::Kind::I0 ? 100 : 0))));
    const double tmax = K.kind == OscillatoryKernel::Kind::I0 ? opt.t_max_i0 : opt.t_max;
    double kernel_worst = 0.0;
    for (int j = 0; j < opt.spots; ++j) {
      const double t = tmax * rng.uniform();
      std::array<int, 3> idx{};
      std::array<double, 3> x{};
      for (int a = 0; a < 3; ++a) {
        const int reach = static_cast<int>(opt.x_radius_units * K.unit() / g.spacing(a));
        const int off = static_cast<int>(std::floor(rng.uniform() * (2 * reach + 1))) - reach;
        idx[a] = g.n(a) / 2 + off;
        x[a] = g.coordinate(a, idx[a]);
      }
      const Complex fast = oscillatory_fft(psi, t)(idx[0], idx[1], idx[2]);
      const Complex quad = oscillatory_quadrature(K, t, x);
      const double rel = std::abs(fast - quad) / std::abs(quad);
      kernel_worst = std::max(kernel_worst, rel);
      r.samples.push_back({K.k, j, rel});
    }
    r.metrics["max_rel_error_" + K.name()] = kernel_worst;
    worst = std::max(worst, kernel_worst);
  }
  r.metrics["max_rel_error"] = worst;
  if (!(worst <= opt.tolerance)) r.fail("FFT and quadrature disagree beyond tolerance");
  return r;
}

}  // namespace zk
