#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace zk {

/// Pairwise (cascade) sum; roundoff grows like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t block = 64;
  if (values.size() <= block) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Pairwise sum of f(i) for i in [0, n) without materialising the terms.
template <class F>
double pairwise_sum_of(std::size_t first, std::size_t last, const F& f) {
  constexpr std::size_t block = 64;
  if (last - first <= block) {
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = first + (last - first) / 2;
  return pairwise_sum_of(first, mid, f) + pairwise_sum_of(mid, last, f);
}

/// Neumaier-compensated running sum, used when terms arrive one at a time.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace zk
