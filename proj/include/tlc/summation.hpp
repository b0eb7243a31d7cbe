#pragma once

#include <cmath>
#include <span>

namespace tlc {

// Neumaier's variant of Kahan summation. Robust when terms vary in magnitude,
// which plain Kahan is not.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

template <typename F>
double compensated_sum_of(std::span<const double> xs, F&& f) {
  CompensatedSum acc;
  for (double x : xs) acc.add(f(x));
  return acc.value();
}

}  // namespace tlc
