#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "zk/field.hpp"

namespace zk {

namespace detail {

/// Process-wide FFTW plan cache. Planning is serialised; execution uses the
/// new-array interface so one plan serves every buffer of the same shape.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  fftw_plan get(const std::array<int, 3>& n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n[0], n[1], n[2], sign, threads_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    ComplexBuffer scratch(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan_with_nthreads(threads_);
    // FFTW is row-major with the last index fastest; our layout is x-fastest.
    fftw_plan plan = fftw_plan_dft_3d(n[2], n[1], n[0], p, p, sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  void set_threads(int threads) {
    std::lock_guard lock(mutex_);
    threads_ = threads < 1 ? 1 : threads;
  }
  int threads() const { return threads_; }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() { fftw_init_threads(); }
  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans_;
  int threads_ = 1;
};

inline void apply_origin_phase(Field& f) {
  // x_j starts at -L/2, so each mode picks up exp(i*pi*m) = (-1)^m.
  const auto& g = f.grid();
  auto d = f.data();
  for (int iz = 0; iz < g.n(2); ++iz) {
    for (int iy = 0; iy < g.n(1); ++iy) {
      for (int ix = 0; ix < g.n(0); ++ix) {
        if ((ix + iy + iz) & 1) d[g.flat(ix, iy, iz)] = -d[g.flat(ix, iy, iz)];
      }
    }
  }
}

}  // namespace detail

/// Thread count used by FFT plans created from now on.
inline void set_fft_threads(int threads) { detail::FftPlans::instance().set_threads(threads); }

/// Physical -> spectral, unitary: u_hat(xi) = dV / (2 pi)^{3/2} * sum_x u(x) exp(-i x.xi).
inline Field forward(Field f) {
  f.require(Representation::physical, "forward");
  const auto& g = f.grid();
  fftw_plan plan = detail::FftPlans::instance().get(g.shape(), FFTW_FORWARD);
  auto* p = reinterpret_cast<fftw_complex*>(f.data().data());
  fftw_execute_dft(plan, p, p);
  const double scale = g.cell_volume() / std::pow(2.0 * std::numbers::pi, 1.5);
  for (auto& v : f.data()) v *= scale;
  detail::apply_origin_phase(f);
  return retag(std::move(f), Representation::spectral);
}

/// Spectral -> physical, the exact inverse of forward().
inline Field inverse(Field f) {
  f.require(Representation::spectral, "inverse");
  const auto& g = f.grid();
  detail::apply_origin_phase(f);
  fftw_plan plan = detail::FftPlans::instance().get(g.shape(), FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(f.data().data());
  fftw_execute_dft(plan, p, p);
  const double scale = g.dual_cell_volume() / std::pow(2.0 * std::numbers::pi, 1.5);
  for (auto& v : f.data()) v *= scale;
  return retag(std::move(f), Representation::physical);
}

inline Field to_spectral(Field f) { return f.is_spectral() ? f : forward(std::move(f)); }
inline Field to_physical(Field f) { return f.is_physical() ? f : inverse(std::move(f)); }
inline Field to_rep(Field f, Representation rep) {
  return rep == Representation::spectral ? to_spectral(std::move(f)) : to_physical(std::move(f));
}

}  // namespace zk
