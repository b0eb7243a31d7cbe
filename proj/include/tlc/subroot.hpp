#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tlc/error.hpp"

namespace tlc {

/// A nonnegative, nondecreasing ψ on (0, ∞) with ψ(r)/√r nonincreasing.
/// The property is not enforced at construction; fixed_point() checks it on
/// a grid.
class SubRootFn {
 public:
  explicit SubRootFn(std::function<double(double)> fn) : fn_(std::move(fn)) {}

  double operator()(double r) const { return fn_(r); }

 private:
  std::function<double(double)> fn_;
};

/// ψ(r) = a√r + b.
inline SubRootFn power_subroot(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw InvalidArgument("power_subroot requires a, b >= 0");
  return SubRootFn([a, b](double r) { return a * std::sqrt(std::max(r, 0.0)) + b; });
}

struct FixedPoint {
  double r_star = 0.0;
  double residual = 0.0;  // |ψ(r*) − r*|
  std::size_t iterations = 0;
};

inline constexpr double kDefaultFixedPointTolerance = 1e-10;
inline constexpr std::size_t kSubRootGridPoints = 64;

/// 64 geometric points spanning [lo, hi].
inline std::vector<double> geometric_grid(double lo, double hi,
                                          std::size_t points = kSubRootGridPoints) {
  std::vector<double> g(points);
  const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo * std::exp(ratio * static_cast<double>(k));
  g.back() = hi;
  return g;
}

/// Checks the sub-root predicate on `grid` (ascending). Returns an empty
/// string when it holds, else a description of the first violation.
inline std::string subroot_violation(const SubRootFn& psi, const std::vector<double>& grid) {
  constexpr double slack = 1e-12;
  double prev_r = 0.0;
  double prev_v = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid[k];
    const double v = psi(r);
    if (!std::isfinite(v) || v < 0.0) return "psi(" + std::to_string(r) + ") is negative or not finite";
    if (k > 0) {
      if (v < prev_v - slack * std::max(1.0, std::abs(prev_v))) {
        return "psi decreases between r=" + std::to_string(prev_r) + " and r=" + std::to_string(r);
      }
      const double a = prev_v / std::sqrt(prev_r);
      const double b = v / std::sqrt(r);
      if (b > a + slack * std::max(1.0, a)) {
        return "psi(r)/sqrt(r) increases between r=" + std::to_string(prev_r) +
               " and r=" + std::to_string(r);
      }
    }
    prev_r = r;
    prev_v = v;
  }
  return {};
}

/// Unique positive solution of ψ(r) = r by bisection on [tol, 2·max(1, ψ(1)²)].
/// ψ ≡ 0 on the validation grid yields r* = 0.
inline FixedPoint fixed_point(const SubRootFn& psi, double tol = kDefaultFixedPointTolerance) {
  if (!(tol > 0.0)) throw InvalidArgument("fixed_point requires tol > 0");
  const double psi1 = psi(1.0);
  double hi = 2.0 * std::max(1.0, psi1 * psi1);
  double lo = tol;
  const auto grid = geometric_grid(lo, hi);
  if (auto why = subroot_violation(psi, grid); !why.empty()) throw NotSubRoot(why);
  if (std::all_of(grid.begin(), grid.end(), [&](double r) { return psi(r) == 0.0; })) {
    return FixedPoint{0.0, 0.0, 0};
  }

  // Root below tol: ψ(r) − r changes sign in (0, lo].
  if (psi(lo) < lo) {
    hi = lo;
    lo = 0.0;
  }
  FixedPoint fp;
  while (hi - lo > tol / 8.0 && fp.iterations < 400) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) >= mid) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++fp.iterations;
  }
  fp.r_star = 0.5 * (lo + hi);
  fp.residual = std::abs(psi(fp.r_star) - fp.r_star);
  return fp;
}

}  // namespace tlc
