#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <fftw3.h>

#include "zk/error.hpp"
#include "zk/grid.hpp"
#include "zk/summation.hpp"

namespace zk {

using Complex = std::complex<double>;

/// Allocator returning FFTW-aligned storage so plans can be reused across arrays.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

enum class Representation : std::uint8_t { physical = 0, spectral = 1 };

inline const char* to_string(Representation rep) { return rep == Representation::physical ? "physical" : "spectral"; }

/// One scalar field on a FourierGrid, tagged with its representation.
class Field {
 public:
  Field() = default;
  Field(const FourierGrid& grid, Representation rep) : grid_(grid), rep_(rep), data_(grid.size(), Complex{}) {}
  Field(const FourierGrid& grid, Representation rep, ComplexBuffer data)
      : grid_(grid), rep_(rep), data_(std::move(data)) {
    if (data_.size() != grid_.size()) throw InvalidArgument("Field: data size does not match grid");
  }

  /// Samples f(x, y, z) at the grid nodes.
  static Field from_function(const FourierGrid& grid, const std::function<double(double, double, double)>& f) {
    Field out(grid, Representation::physical);
    for (int iz = 0; iz < grid.n(2); ++iz) {
      const double z = grid.coordinate(2, iz);
      for (int iy = 0; iy < grid.n(1); ++iy) {
        const double y = grid.coordinate(1, iy);
        for (int ix = 0; ix < grid.n(0); ++ix) {
          out.data_[grid.flat(ix, iy, iz)] = f(grid.coordinate(0, ix), y, z);
        }
      }
    }
    return out;
  }

  const FourierGrid& grid() const { return grid_; }
  Representation rep() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  bool is_spectral() const { return rep_ == Representation::spectral; }

  std::size_t size() const { return data_.size(); }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  ComplexBuffer& buffer() { return data_; }

  Complex& operator()(int ix, int iy, int iz) { return data_[grid_.flat(ix, iy, iz)]; }
  const Complex& operator()(int ix, int iy, int iz) const { return data_[grid_.flat(ix, iy, iz)]; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  Field& operator+=(const Field& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  Field& operator-=(const Field& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }
  Field& operator*=(Complex c) {
    for (auto& v : data_) v *= c;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, Complex c) { return a *= c; }
  friend Field operator*(Complex c, Field a) { return a *= c; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_abs_imag() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v.imag()));
    return m;
  }
  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

  /// Drops imaginary parts (physical fields only).
  void make_real() {
    require(Representation::physical, "make_real");
    for (auto& v : data_) v = v.real();
  }

  void require(Representation rep, const char* op) const {
    if (rep_ != rep) {
      throw InvalidState(std::string(op) + ": expected " + to_string(rep) + " field, got " + to_string(rep_));
    }
  }

  void check_compatible(const Field& other) const {
    if (!(grid_ == other.grid_)) throw InvalidArgument("Field: grids differ");
    if (rep_ != other.rep_) throw InvalidState("Field: representations differ");
  }

 private:
  friend Field retag(Field f, Representation rep);
  FourierGrid grid_;
  Representation rep_ = Representation::physical;
  ComplexBuffer data_;
};

/// Reinterprets the buffer under another representation tag (used by the transforms).
inline Field retag(Field f, Representation rep) {
  f.rep_ = rep;
  return f;
}

/// Discrete L2 norm using the measure matching the representation (dV or the dual cell volume).
inline double l2_norm(const Field& f) {
  const double measure = f.is_physical() ? f.grid().cell_volume() : f.grid().dual_cell_volume();
  const auto d = f.data();
  const double s = pairwise_sum_of(0, d.size(), [&](std::size_t i) { return std::norm(d[i]); });
  return std::sqrt(s * measure);
}

inline double max_abs_difference(const Field& a, const Field& b) {
  a.check_compatible(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace zk
