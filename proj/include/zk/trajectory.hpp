#pragma once

#include <optional>
#include <vector>

#include "zk/error.hpp"
#include "zk/field.hpp"

namespace zk {

/// Uniformly sampled sequence of physical fields: frame m lives at t0 + m * dt_sample.
class Trajectory {
 public:
  Trajectory(const FourierGrid& grid, double t0, double dt_sample) : grid_(grid), t0_(t0), dt_(dt_sample) {
    if (!(dt_sample > 0.0) || !std::isfinite(dt_sample)) throw InvalidArgument("Trajectory: dt_sample must be > 0");
  }

  void push_back(Field frame) {
    frame.require(Representation::physical, "Trajectory::push_back");
    if (!(frame.grid() == grid_)) throw InvalidArgument("Trajectory: frame grid differs");
    frames_.push_back(std::move(frame));
  }

  const FourierGrid& grid() const { return grid_; }
  double t0() const { return t0_; }
  double dt_sample() const { return dt_; }
  double time(std::size_t m) const { return t0_ + static_cast<double>(m) * dt_; }
  double t_end() const { return frames_.empty() ? t0_ : time(frames_.size() - 1); }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  const Field& operator[](std::size_t m) const { return frames_[m]; }
  Field& operator[](std::size_t m) { return frames_[m]; }
  const std::vector<Field>& frames() const { return frames_; }

  std::optional<double> alpha;

 private:
  FourierGrid grid_;
  double t0_;
  double dt_;
  std::vector<Field> frames_;
};

/// Frame-wise difference a - b; both must share grid and sampling.
inline Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid() == b.grid()) || a.size() != b.size() || a.t0() != b.t0() || a.dt_sample() != b.dt_sample()) {
    throw InvalidArgument("difference: trajectories are not aligned");
  }
  Trajectory out(a.grid(), a.t0(), a.dt_sample());
  out.alpha = a.alpha;
  for (std::size_t m = 0; m < a.size(); ++m) out.push_back(a[m] - b[m]);
  return out;
}

}  // namespace zk
