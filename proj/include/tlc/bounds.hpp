#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "tlc/csv.hpp"
#include "tlc/error.hpp"
#include "tlc/function_class.hpp"

namespace tlc {

/// Scalar inputs shared by the closed-form bounds. Fields a given bound does
/// not read may stay at their defaults.
struct BoundInputs {
  std::size_t u = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double x = 1.0;           // confidence exponent, failure probability e^{-x}
  double r = 0.0;           // variance proxy
  double H0 = kRangeFloor;  // range bound (L0 on loss paths)
  double K_peel = 2.0;
  double B = 1.0;
  double expected_g = 0.0;     // E[g]
  double complexity_h1 = 0.0;  // 𝔕⁺ of H1 at test size min{u, m}
  double r_u = 0.0;
  double r_m = 0.0;
  double r_star = 0.0;

  std::size_t min_um() const { return std::min(u, m); }
};

inline void check_common(const BoundInputs& in) {
  if (!(in.x > 0.0)) throw InvalidArgument("x must be > 0");
  if (in.u == 0 || in.m == 0) throw InvalidArgument("bounds need u >= 1 and m >= 1");
  if (in.n != 0 && in.n != in.u + in.m) throw InvalidArgument("n must equal u + m");
  if (!(in.r >= 0.0) || !(in.H0 >= 0.0) || !(in.expected_g >= 0.0) || !(in.complexity_h1 >= 0.0) ||
      !(in.r_u >= 0.0) || !(in.r_m >= 0.0) || !(in.r_star >= 0.0)) {
    throw InvalidArgument("bound inputs must be nonnegative");
  }
}

enum class Provenance { proof_derived, configured };

struct Constant {
  double value = 0.0;
  Provenance provenance = Provenance::proof_derived;
};

struct ConstantSet {
  Constant c0, c1, c2, c3, c5{1.0, Provenance::configured}, hat_c2;
  Constant theta{1.0, Provenance::configured};
};

/// Values from a config file. Anything set here replaces the derived value.
struct ConstantOverrides {
  std::optional<double> c0, c1, c2, c3, c5, hat_c2, theta;
};

/// inf over α > 0 of A/α + B·α.
inline double optimal_alpha_term(double A, double B_coef) {
  if (!(A >= 0.0) || !(B_coef >= 0.0)) throw InvalidArgument("alpha term needs A, B >= 0");
  if (A == 0.0 || B_coef == 0.0) return 0.0;
  return 2.0 * std::sqrt(A * B_coef);
}

/// E[g] + 8√(3rx/min) + inf_α(4𝔕/α + 4αx/min) + 8H0²x/min.
inline double concentration_deviation(const BoundInputs& in) {
  check_common(in);
  const double mn = static_cast<double>(in.min_um());
  const double xr = in.x / mn;
  return in.expected_g + 8.0 * std::sqrt(3.0 * in.r * xr) +
         optimal_alpha_term(4.0 * in.complexity_h1, 4.0 * xr) + 8.0 * in.H0 * in.H0 * xr;
}

/// c0 = 24K·128²/49, c1 = 24K·192 + 16H0² + 8.
inline ConstantSet tlc_constants(double K_peel, double range_bound) {
  if (!(K_peel > 1.0)) throw InvalidArgument("K_peel must be > 1");
  if (!(range_bound >= kRangeFloor * (1.0 - 1e-15))) {
    throw InvalidArgument("range bound must be >= 2*sqrt(2)");
  }
  ConstantSet cs;
  cs.c0 = {24.0 * K_peel * 128.0 * 128.0 / 49.0, Provenance::proof_derived};
  cs.c1 = {24.0 * K_peel * 192.0 + 16.0 * range_bound * range_bound + 8.0, Provenance::proof_derived};
  return cs;
}

/// Full constant set for the excess-risk path. hat_c2 defaults to max(c0, c1),
/// c2 = hat_c2 / (1 − B/K), c3 = c1 + 4B·c2/K.
inline ConstantSet resolve_constants(double K_peel, double range_bound, double B,
                                     const ConstantOverrides& ov = {}) {
  ConstantSet cs = tlc_constants(K_peel, range_bound);
  auto take = [](Constant& c, const std::optional<double>& v, const char* name) {
    if (!v) return;
    if (!(*v > 0.0)) throw ConfigError(std::string("constants.") + name + " must be > 0");
    c = {*v, Provenance::configured};
  };
  take(cs.c0, ov.c0, "c0");
  take(cs.c1, ov.c1, "c1");
  take(cs.c5, ov.c5, "c5");
  take(cs.theta, ov.theta, "theta");
  cs.hat_c2 = {std::max(cs.c0.value, cs.c1.value), Provenance::proof_derived};
  take(cs.hat_c2, ov.hat_c2, "hat_c2");
  if (!(B >= 0.0)) throw InvalidArgument("B must be >= 0");
  if (K_peel <= B && !(ov.c2 && ov.c3)) {
    throw InvalidArgument("K_peel = " + format_double(K_peel) + " must exceed B = " + format_double(B));
  }
  if (K_peel > B) {
    cs.c2 = {cs.hat_c2.value / (1.0 - B / K_peel), Provenance::proof_derived};
  }
  take(cs.c2, ov.c2, "c2");
  cs.c3 = {cs.c1.value + 4.0 * B * cs.c2.value / K_peel, Provenance::proof_derived};
  take(cs.c3, ov.c3, "c3");
  return cs;
}

/// L + T̃/K + c0(r_u + r_m) + c1·x/min.
inline double tlc_uniform_bound(double train_loss, double tilde_T, const BoundInputs& in,
                                const ConstantSet& cs) {
  check_common(in);
  if (!(in.K_peel > 1.0)) throw InvalidArgument("K_peel must be > 1");
  return train_loss + tilde_T / in.K_peel + cs.c0.value * (in.r_u + in.r_m) +
         cs.c1.value * in.x / static_cast<double>(in.min_um());
}

/// c0(r_u + r_m) + 4B·c2·r*/K + c3·x/min.
inline double excess_risk_bound(const BoundInputs& in, const ConstantSet& cs) {
  check_common(in);
  if (!(in.K_peel > in.B)) {
    throw InvalidArgument("K_peel = " + format_double(in.K_peel) + " must exceed B = " +
                          format_double(in.B));
  }
  return cs.c0.value * (in.r_u + in.r_m) + 4.0 * in.B * cs.c2.value * in.r_star / in.K_peel +
         cs.c3.value * in.x / static_cast<double>(in.min_um());
}

inline constexpr double kZeroMeanTolerance = 1e-12;

/// (4m/n)·(2√(3rx/min) + inf_α(𝔕/α + αx/min) + 2H0²x/min).
/// When `cls` is given every row must have L_n(h) = 0.
inline double general_sup_bound(const BoundInputs& in, const FunctionTable* cls = nullptr) {
  check_common(in);
  if (cls) {
    for (std::size_t j = 0; j < cls->size(); ++j) {
      const double mean = average_loss(cls->row(j));
      if (std::abs(mean) > kZeroMeanTolerance) {
        throw InvalidClass("function '" + cls->name(j) + "' has L_n(h) = " + format_double(mean));
      }
    }
  }
  const double n = static_cast<double>(in.u + in.m);
  const double xr = in.x / static_cast<double>(in.min_um());
  return 4.0 * static_cast<double>(in.m) / n *
         (2.0 * std::sqrt(3.0 * in.r * xr) + optimal_alpha_term(in.complexity_h1, xr) +
          2.0 * in.H0 * in.H0 * xr);
}

struct PriorSupBounds {
  double v1 = 0.0;
  double v2 = 0.0;
};

/// v1 = 2√(2nrt/u²), v2 = 2√(2(r + 2Ē)t/u) + t/3 + 2m²/n with t = x.
/// The 2m²/n term is taken as printed even though it does not shrink with n.
inline PriorSupBounds prior_sup_bounds(const BoundInputs& in, double E_bar_g) {
  check_common(in);
  if (!(E_bar_g >= 0.0)) throw InvalidArgument("E_bar_g must be >= 0");
  const double n = static_cast<double>(in.u + in.m);
  const double u = static_cast<double>(in.u);
  const double m = static_cast<double>(in.m);
  const double t = in.x;
  return {2.0 * std::sqrt(2.0 * n * in.r * t / (u * u)),
          2.0 * std::sqrt(2.0 * (in.r + 2.0 * E_bar_g) * t / u) + t / 3.0 + 2.0 * m * m / n};
}

/// θ(n/u·r_m* + n/m·r_u* + 1/m + 1/u).
inline double generic_prior_excess(const BoundInputs& in, double r_u_star, double r_m_star,
                                   double theta) {
  if (in.u == 0 || in.m == 0) throw InvalidArgument("bounds need u >= 1 and m >= 1");
  if (!(r_u_star >= 0.0) || !(r_m_star >= 0.0) || !(theta > 0.0)) {
    throw InvalidArgument("prior excess needs r* >= 0 and theta > 0");
  }
  const double n = static_cast<double>(in.u + in.m);
  const double u = static_cast<double>(in.u);
  const double m = static_cast<double>(in.m);
  return theta * (n / u * r_m_star + n / m * r_u_star + 1.0 / m + 1.0 / u);
}

}  // namespace tlc
