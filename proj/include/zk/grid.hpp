#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>

#include "zk/error.hpp"

namespace zk {

/// Periodic box [-L_a/2, L_a/2) per axis with n_a points, and its dual lattice
/// of frequencies (2*pi/L_a)*m, m in [-n_a/2, n_a/2).
///
/// Spectral arrays are stored in FFT order: index i holds mode i for
/// i < n/2 and mode i - n otherwise. Flat indices are x-fastest.
class FourierGrid {
 public:
  FourierGrid() = default;

  int n(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  const std::array<int, 3>& shape() const { return n_; }
  const std::array<double, 3>& lengths() const { return length_; }

  std::size_t size() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(n_[2]);
  }

  double spacing(int axis) const { return length_[axis] / n_[axis]; }
  double dual_spacing(int axis) const { return 2.0 * std::numbers::pi / length_[axis]; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double dual_cell_volume() const { return dual_spacing(0) * dual_spacing(1) * dual_spacing(2); }

  /// Integer mode of FFT-order index i.
  int mode(int axis, int i) const { return i < n_[axis] / 2 ? i : i - n_[axis]; }

  /// FFT-order index of integer mode m; m must lie in [-n/2, n/2).
  int index(int axis, int m) const { return m >= 0 ? m : m + n_[axis]; }

  bool is_nyquist(int axis, int i) const { return i == n_[axis] / 2; }

  double frequency(int axis, int i) const { return dual_spacing(axis) * mode(axis, i); }

  /// Frequency used by multipliers that are odd along `axis`: zero on the Nyquist plane.
  double odd_frequency(int axis, int i) const { return is_nyquist(axis, i) ? 0.0 : frequency(axis, i); }

  double nyquist(int axis) const { return dual_spacing(axis) * (n_[axis] / 2); }

  /// Largest |xi| over the lattice (attained at the all-Nyquist corner).
  double max_radius() const {
    return std::sqrt(nyquist(0) * nyquist(0) + nyquist(1) * nyquist(1) + nyquist(2) * nyquist(2));
  }

  double coordinate(int axis, int i) const { return -0.5 * length_[axis] + i * spacing(axis); }

  std::size_t flat(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(n_[0]) * (static_cast<std::size_t>(iy) + static_cast<std::size_t>(n_[1]) * iz);
  }

  bool isotropic() const { return length_[0] == length_[1] && length_[1] == length_[2]; }

  /// Short identifier used in norm reports, e.g. "32x32x32_L6.28319".
  std::string id() const {
    std::ostringstream os;
    os << n_[0] << 'x' << n_[1] << 'x' << n_[2] << "_L";
    if (isotropic()) {
      os << length_[0];
    } else {
      os << length_[0] << ',' << length_[1] << ',' << length_[2];
    }
    return os.str();
  }

  bool operator==(const FourierGrid&) const = default;

  friend FourierGrid make_grid(std::array<int, 3> n, std::array<double, 3> length);

 private:
  std::array<int, 3> n_{8, 8, 8};
  std::array<double, 3> length_{2.0 * std::numbers::pi, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
};

inline FourierGrid make_grid(std::array<int, 3> n, std::array<double, 3> length) {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 8 || n[a] % 2 != 0) {
      throw InvalidArgument("make_grid: points per axis must be even and >= 8, got " + std::to_string(n[a]));
    }
    if (!std::isfinite(length[a]) || length[a] <= 0.0) {
      throw InvalidArgument("make_grid: box length must be finite and positive");
    }
  }
  FourierGrid grid;
  grid.n_ = n;
  grid.length_ = length;
  return grid;
}

inline FourierGrid make_grid(std::array<int, 3> n, double length) { return make_grid(n, {length, length, length}); }

inline FourierGrid make_grid(int n, double length) { return make_grid({n, n, n}, {length, length, length}); }

}  // namespace zk
