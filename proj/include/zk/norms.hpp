#pragma once

#include <cmath>
#include <vector>

#include "zk/bump.hpp"
#include "zk/fft.hpp"
#include "zk/projection.hpp"

namespace zk {

/// ||P_0 f|| and ||Delta_k f||, k = 0..truncation_index, all in L2.
struct ShellDecomposition {
  double p0 = 0.0;
  std::vector<double> shells;
  int truncation_index = -1;
};

inline ShellDecomposition shell_decomposition(const Field& f) {
  const Field s = to_spectral(f);
  ShellDecomposition out;
  out.truncation_index = max_shell(s.grid());
  out.p0 = projected_l2(s, projector_mask(s.grid(), Projector::P, 0));
  for (int k = 0; k <= out.truncation_index; ++k) {
    out.shells.push_back(projected_l2(s, projector_mask(s.grid(), Projector::Delta, k)));
  }
  return out;
}

/// ||<grad>^s f||_{L2}.
inline double sobolev_norm(const Field& f, double s) {
  const Field sp = to_spectral(f);
  const auto& g = sp.grid();
  std::vector<double> terms(sp.size());
  for_each_mode(g, [&](const Mode& m) {
    const double w = std::pow(1.0 + m.xi * m.xi + m.eta * m.eta + m.mu * m.mu, s);
    terms[m.flat] = w * std::norm(sp[m.flat]);
  });
  return std::sqrt(pairwise_sum(terms) * g.dual_cell_volume());
}

/// ||P_0 f|| + (sum_k 4^{sk} ||Delta_k f||^2)^{1/2}, truncated at the last lattice shell.
inline double sobolev_norm_dyadic(const Field& f, double s) {
  const auto d = shell_decomposition(f);
  double sum = 0.0;
  for (std::size_t k = 0; k < d.shells.size(); ++k) sum += std::exp2(2.0 * s * k) * d.shells[k] * d.shells[k];
  return d.p0 + std::sqrt(sum);
}

/// ||P_0 f|| + sum_k 2^{sk} ||Delta_k f||.
inline double besov_norm(const Field& f, double s) {
  const auto d = shell_decomposition(f);
  double sum = d.p0;
  for (std::size_t k = 0; k < d.shells.size(); ++k) sum += std::exp2(s * k) * d.shells[k];
  return sum;
}

}  // namespace zk
