#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "zk/error.hpp"
#include "zk/field.hpp"
#include "zk/summation.hpp"
#include "zk/trajectory.hpp"

namespace zk {

enum class Exponent { one, two, infinity };

/// Axis bit flags for the four space-time directions.
enum AxisBits : unsigned { kAxisX = 1u, kAxisY = 2u, kAxisZ = 4u, kAxisT = 8u, kAxesXYZ = 7u, kAxesAll = 15u };

/// ||u||_{L^p_outer L^q_inner}: the inner norm is taken first over `inner_axes`
/// (optionally after multiplying frame t by |t|^alpha), then the outer norm over the rest.
struct MixedNormSpec {
  unsigned outer_axes = kAxisX;
  Exponent outer = Exponent::two;
  unsigned inner_axes = kAxisY | kAxisZ | kAxisT;
  Exponent inner = Exponent::infinity;
  std::optional<double> weight_alpha;

  void validate() const {
    if ((outer_axes & inner_axes) != 0u || (outer_axes | inner_axes) != kAxesAll || outer_axes == 0u ||
        inner_axes == 0u) {
      throw InvalidArgument("MixedNormSpec: outer and inner axes must partition {x, y, z, t}");
    }
    if (weight_alpha && !std::isfinite(*weight_alpha)) throw InvalidArgument("MixedNormSpec: weight must be finite");
  }

  std::string name() const {
    auto exp = [](Exponent e) { return e == Exponent::one ? "L1" : e == Exponent::two ? "L2" : "Linf"; };
    auto axes = [](unsigned a) {
      std::string s;
      if (a & kAxisX) s += 'x';
      if (a & kAxisY) s += 'y';
      if (a & kAxisZ) s += 'z';
      if (a & kAxisT) s += 'T';
      return s;
    };
    std::string s = std::string(exp(outer)) + "_" + axes(outer_axes) + " " + exp(inner) + "_" + axes(inner_axes);
    if (weight_alpha) s = "t^" + std::to_string(*weight_alpha) + " " + s;
    return s;
  }
};

/// L^2_x L^inf_{yzT}, the maximal-function norm.
inline MixedNormSpec maximal_norm_spec(std::optional<double> alpha = std::nullopt) {
  return {kAxisX, Exponent::two, kAxisY | kAxisZ | kAxisT, Exponent::infinity, alpha};
}
/// L^inf_x L^2_{yzT}, the local-smoothing norm.
inline MixedNormSpec smoothing_norm_spec() { return {kAxisX, Exponent::infinity, kAxisY | kAxisZ | kAxisT, Exponent::two, {}}; }
/// L^1_x L^2_{yzT}.
inline MixedNormSpec dual_smoothing_norm_spec() { return {kAxisX, Exponent::one, kAxisY | kAxisZ | kAxisT, Exponent::two, {}}; }
/// L^1_x L^inf_{yzT}.
inline MixedNormSpec kernel_norm_spec(std::optional<double> alpha = std::nullopt) {
  return {kAxisX, Exponent::one, kAxisY | kAxisZ | kAxisT, Exponent::infinity, alpha};
}
/// L^inf_T L^2_{xyz}, the energy norm.
inline MixedNormSpec energy_norm_spec() { return {kAxisT, Exponent::infinity, kAxesXYZ, Exponent::two, {}}; }

/// Streaming evaluation of a mixed norm: frames are added one at a time, so
/// long trajectories never need to be stored.
class MixedNormAccumulator {
 public:
  MixedNormAccumulator(const FourierGrid& grid, MixedNormSpec spec, double dt_sample)
      : grid_(grid), spec_(spec), dt_(dt_sample) {
    spec_.validate();
    if (!(dt_sample > 0.0)) throw InvalidArgument("MixedNormAccumulator: dt_sample must be > 0");
    std::size_t stride = 1;
    inner_measure_ = 1.0;
    outer_measure_ = 1.0;
    for (int a = 0; a < 3; ++a) {
      const unsigned bit = 1u << a;
      if (spec_.outer_axes & bit) {
        strides_[a] = stride;
        stride *= static_cast<std::size_t>(grid.n(a));
        outer_measure_ *= grid.spacing(a);
      } else {
        strides_[a] = 0;
        inner_measure_ *= grid.spacing(a);
      }
    }
    keys_ = stride;
    time_inner_ = (spec_.inner_axes & kAxisT) != 0u;
    if (!time_inner_) outer_measure_ *= dt_;
    // Group flat indices by outer key once; per-key sums are then pairwise.
    std::vector<std::size_t> key_of(grid.size());
    for (int iz = 0; iz < grid.n(2); ++iz)
      for (int iy = 0; iy < grid.n(1); ++iy)
        for (int ix = 0; ix < grid.n(0); ++ix)
          key_of[grid.flat(ix, iy, iz)] = ix * strides_[0] + iy * strides_[1] + iz * strides_[2];
    offsets_.assign(keys_ + 1, 0);
    for (std::size_t k : key_of) ++offsets_[k + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    order_.resize(grid.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < key_of.size(); ++i) order_[fill[key_of[i]]++] = i;
    time_acc_.assign(time_inner_ ? keys_ : 0, CompensatedSum{});
    time_max_.assign(time_inner_ ? keys_ : 0, 0.0);
  }

  /// Adds the frame sampled at time t (physical representation).
  void add(const Field& frame, double t) {
    frame.require(Representation::physical, "MixedNormAccumulator::add");
    if (!(frame.grid() == grid_)) throw InvalidArgument("MixedNormAccumulator: grid differs");
    const double w = spec_.weight_alpha ? std::pow(std::abs(t), *spec_.weight_alpha) : 1.0;
    const auto d = frame.data();
    const bool spatial_inner = (spec_.inner_axes & kAxesXYZ) != 0u;
    for (std::size_t key = 0; key < keys_; ++key) {
      const std::size_t b = offsets_[key];
      const std::size_t e = offsets_[key + 1];
      // Inner spatial reduction: max, sum |u|^2 dV or sum |u| dV.
      double partial = 0.0;
      if (spec_.inner == Exponent::infinity) {
        for (std::size_t j = b; j < e; ++j) partial = std::max(partial, std::norm(d[order_[j]]));
        partial = std::sqrt(partial) * w;
      } else if (spec_.inner == Exponent::two) {
        partial = pairwise_sum_of(b, e, [&](std::size_t j) { return std::norm(d[order_[j]]); }) * w * w;
        if (spatial_inner) partial *= inner_measure_;
      } else {
        partial = pairwise_sum_of(b, e, [&](std::size_t j) { return std::abs(d[order_[j]]); }) * w;
        if (spatial_inner) partial *= inner_measure_;
      }
      if (time_inner_) {
        if (spec_.inner == Exponent::infinity) {
          time_max_[key] = std::max(time_max_[key], partial);
        } else {
          time_acc_[key].add(partial * dt_);
        }
      } else {
        const double inner = spec_.inner == Exponent::two ? std::sqrt(partial) : partial;
        accumulate_outer(inner);
      }
    }
    ++frames_;
  }

  std::size_t frames() const { return frames_; }

  double value() const {
    if (frames_ == 0) throw InvalidArgument("mixed norm of an empty trajectory");
    if (!time_inner_) return finish_outer(outer_max_, outer_sum_.value());
    double mx = 0.0;
    std::vector<double> terms(keys_);
    for (std::size_t key = 0; key < keys_; ++key) {
      double inner;
      if (spec_.inner == Exponent::infinity) {
        inner = time_max_[key];
      } else if (spec_.inner == Exponent::two) {
        inner = std::sqrt(time_acc_[key].value());
      } else {
        inner = time_acc_[key].value();
      }
      mx = std::max(mx, inner);
      terms[key] = spec_.outer == Exponent::two ? inner * inner : inner;
    }
    return finish_outer(mx, pairwise_sum(terms));
  }

  /// Inner norm per outer column (only when time is an inner axis), e.g. the per-x profile.
  std::vector<double> inner_profile() const {
    if (!time_inner_) throw InvalidState("inner_profile: time is an outer axis");
    std::vector<double> out(keys_);
    for (std::size_t key = 0; key < keys_; ++key) {
      out[key] = spec_.inner == Exponent::infinity ? time_max_[key]
                 : spec_.inner == Exponent::two    ? std::sqrt(time_acc_[key].value())
                                                   : time_acc_[key].value();
    }
    return out;
  }

 private:
  void accumulate_outer(double inner) {
    outer_max_ = std::max(outer_max_, inner);
    if (spec_.outer == Exponent::two) {
      outer_sum_.add(inner * inner);
    } else if (spec_.outer == Exponent::one) {
      outer_sum_.add(inner);
    }
  }

  double finish_outer(double mx, double sum) const {
    switch (spec_.outer) {
      case Exponent::infinity: return mx;
      case Exponent::two: return std::sqrt(sum * outer_measure_);
      case Exponent::one: return sum * outer_measure_;
    }
    return 0.0;
  }

  FourierGrid grid_;
  MixedNormSpec spec_;
  double dt_;
  std::array<std::size_t, 3> strides_{};
  std::size_t keys_ = 1;
  bool time_inner_ = true;
  double inner_measure_ = 1.0;
  double outer_measure_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> order_;
  std::vector<CompensatedSum> time_acc_;
  std::vector<double> time_max_;
  double outer_max_ = 0.0;
  CompensatedSum outer_sum_;
  std::size_t frames_ = 0;
};

/// Discrete mixed norm of a trajectory: left-endpoint rule in t, max over samples for L^inf.
inline double mixed_norm(const Trajectory& traj, const MixedNormSpec& spec) {
  if (traj.empty()) throw InvalidArgument("mixed_norm: empty trajectory");
  MixedNormAccumulator acc(traj.grid(), spec, traj.dt_sample());
  for (std::size_t m = 0; m < traj.size(); ++m) acc.add(traj[m], traj.time(m));
  return acc.value();
}

}  // namespace zk
