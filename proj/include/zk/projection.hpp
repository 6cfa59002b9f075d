#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "zk/bump.hpp"
#include "zk/error.hpp"
#include "zk/fft.hpp"
#include "zk/field.hpp"
#include "zk/spectral.hpp"

namespace zk {

/// Littlewood-Paley projector family.
enum class Projector {
  P,          ///< p_k(|xi|), k >= 0
  Delta,      ///< delta_k(|xi|), any integer k
  Px,         ///< p_k(xi)
  Deltax,     ///< delta_k(xi)
  Py,
  Deltay,
  Pz,
  Deltaz,
  PLesssim,   ///< P_{<~k} = P_0 + sum_{j <= k + margin} Delta_j = p_{k+margin+1}
  PxLesssim,
  PyLesssim,
  PzLesssim,
};

/// Dyadic steps allowed in "2^j <~ 2^k" when realising P_{<~k}.
inline constexpr int kLesssimMargin = 2;

inline const char* to_string(Projector kind) {
  switch (kind) {
    case Projector::P: return "P";
    case Projector::Delta: return "Delta";
    case Projector::Px: return "Px";
    case Projector::Deltax: return "Deltax";
    case Projector::Py: return "Py";
    case Projector::Deltay: return "Deltay";
    case Projector::Pz: return "Pz";
    case Projector::Deltaz: return "Deltaz";
    case Projector::PLesssim: return "PLesssim";
    case Projector::PxLesssim: return "PxLesssim";
    case Projector::PyLesssim: return "PyLesssim";
    case Projector::PzLesssim: return "PzLesssim";
  }
  return "?";
}

/// Symbol of a projector at one frequency.
inline double projector_symbol(const DyadicBump& bump, Projector kind, int k, double xi, double eta, double mu) {
  const double r = std::sqrt(xi * xi + eta * eta + mu * mu);
  switch (kind) {
    case Projector::P: return bump.p_k(r, k);
    case Projector::Delta: return bump.delta_k(r, k);
    case Projector::Px: return bump.p_k(xi, k);
    case Projector::Deltax: return bump.delta_k(xi, k);
    case Projector::Py: return bump.p_k(eta, k);
    case Projector::Deltay: return bump.delta_k(eta, k);
    case Projector::Pz: return bump.p_k(mu, k);
    case Projector::Deltaz: return bump.delta_k(mu, k);
    case Projector::PLesssim: return bump.p_k(r, k + kLesssimMargin + 1);
    case Projector::PxLesssim: return bump.p_k(xi, k + kLesssimMargin + 1);
    case Projector::PyLesssim: return bump.p_k(eta, k + kLesssimMargin + 1);
    case Projector::PzLesssim: return bump.p_k(mu, k + kLesssimMargin + 1);
  }
  return 0.0;
}

using Mask = std::shared_ptr<const std::vector<double>>;

/// Immutable per-grid symbol tables, built once on first use.
class MaskCache {
 public:
  static MaskCache& instance() {
    static MaskCache cache;
    return cache;
  }

  Mask get(const FourierGrid& grid, Projector kind, int k, const DyadicBump& bump = DyadicBump{}) {
    const Key key{grid.shape(), grid.lengths(), static_cast<int>(kind), k, bump.profile()};
    {
      std::lock_guard lock(mutex_);
      if (auto it = masks_.find(key); it != masks_.end()) return it->second;
    }
    auto values = std::make_shared<std::vector<double>>(grid.size());
    for_each_mode(grid, [&](const Mode& m) { (*values)[m.flat] = projector_symbol(bump, kind, k, m.xi, m.eta, m.mu); });
    std::lock_guard lock(mutex_);
    if (masks_.size() > kMaxEntries) masks_.clear();
    return masks_.emplace(key, std::move(values)).first->second;
  }

 private:
  using Key = std::tuple<std::array<int, 3>, std::array<double, 3>, int, int, BumpProfile>;
  static constexpr std::size_t kMaxEntries = 4096;
  std::mutex mutex_;
  std::map<Key, Mask> masks_;
};

inline Mask projector_mask(const FourierGrid& grid, Projector kind, int k, const DyadicBump& bump = DyadicBump{}) {
  return MaskCache::instance().get(grid, kind, k, bump);
}

struct ProjectionFlags {
  bool out_of_band = false;  ///< symbol vanishes on the whole lattice
};

/// Applies a Littlewood-Paley projector; the result keeps the input representation.
inline Field project(const Field& f, Projector kind, int k, ProjectionFlags* flags = nullptr,
                     const DyadicBump& bump = DyadicBump{}) {
  const bool needs_nonnegative = kind == Projector::P || kind == Projector::Px || kind == Projector::Py ||
                                 kind == Projector::Pz;
  if (needs_nonnegative && k < 0) {
    throw InvalidArgument(std::string("project: ") + to_string(kind) + "_k is defined for k >= 0, got k = " +
                          std::to_string(k));
  }
  const Mask mask = projector_mask(f.grid(), kind, k, bump);
  const bool empty = std::all_of(mask->begin(), mask->end(), [](double v) { return v == 0.0; });
  if (flags != nullptr) flags->out_of_band = empty;
  if (empty) return Field(f.grid(), f.rep());
  Field s = to_spectral(f);
  auto d = s.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= (*mask)[i];
  return to_rep(std::move(s), f.rep());
}

/// L2 norm of a projection computed on the spectral side (no inverse transform).
inline double projected_l2(const Field& spectral, const Mask& mask) {
  spectral.require(Representation::spectral, "projected_l2");
  const auto d = spectral.data();
  const auto& m = *mask;
  const double s = pairwise_sum_of(0, d.size(), [&](std::size_t i) { return m[i] * m[i] * std::norm(d[i]); });
  return std::sqrt(s * spectral.grid().dual_cell_volume());
}

}  // namespace zk
