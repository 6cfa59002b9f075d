#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "zk/grid.hpp"

namespace zk {

namespace detail {
inline double flat_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace detail

/// C^inf radial profile: 1 on [0,1], 0 on [2,inf), smooth monotone glue between.
inline double smooth_bump(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = detail::flat_exp(2.0 - r);
  const double b = detail::flat_exp(r - 1.0);
  return a / (a + b);
}

using BumpProfile = double (*)(double);

/// The dyadic family built from one profile p:
///   p_k(r) = p(r / 2^k),  delta(r) = p(r/2) - p(r),  delta_k(r) = delta(r / 2^k).
/// delta_k is supported in 2^k < r < 2^{k+2}.
class DyadicBump {
 public:
  explicit DyadicBump(BumpProfile profile = &smooth_bump) : profile_(profile) {}

  double p(double r) const { return profile_(r); }
  double delta(double r) const { return profile_(0.5 * r) - profile_(r); }
  double p_k(double r, int k) const { return p(std::ldexp(r, -k)); }
  double delta_k(double r, int k) const { return delta(std::ldexp(r, -k)); }

  BumpProfile profile() const { return profile_; }

 private:
  BumpProfile profile_;
};

inline double bump_value(double r) { return smooth_bump(r); }
inline double delta_value(double r) { return smooth_bump(0.5 * r) - smooth_bump(r); }

/// Largest k >= 0 whose shell 2^k < |xi| still meets the lattice (-1 if none).
inline int max_shell(const FourierGrid& grid) {
  const double r = grid.max_radius();
  if (r <= 1.0) return -1;
  return static_cast<int>(std::ceil(std::log2(r))) - 1;
}

}  // namespace zk
