#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlc/error.hpp"
#include "tlc/function_class.hpp"
#include "tlc/parallel.hpp"
#include "tlc/rng.hpp"
#include "tlc/split.hpp"
#include "tlc/summation.hpp"

namespace tlc {

/// Supremum of a process over a tabulated class and the function attaining it.
struct ProcessValue {
  double value = 0.0;
  std::size_t argmax_index = 0;  // lowest index on ties
};

/// Σ_{i ∈ {Z_d}} h(i).
inline double test_sum(std::span<const double> h, const SplitPlan& split) {
  CompensatedSum acc;
  for (std::size_t i : split.test_set()) acc.add(h[i - 1]);
  return acc.value();
}

/// U − L: test mean minus training mean for a single row.
inline double test_train_difference(std::span<const double> h, const SplitPlan& split) {
  const double total = compensated_sum(h);
  const double test = test_sum(h, split);
  return test / static_cast<double>(split.u()) -
         (total - test) / static_cast<double>(split.m());
}

namespace detail {

inline void check_proper_split(std::size_t class_n, const SplitPlan& split) {
  if (split.n() != class_n) {
    throw InvalidArgument("split is over n=" + std::to_string(split.n()) +
                          " but the class has n=" + std::to_string(class_n));
  }
  if (split.u() == 0 || split.m() == 0) {
    throw InvalidArgument("test and training sets must both be nonempty (u=" +
                          std::to_string(split.u()) + ", m=" + std::to_string(split.m()) + ")");
  }
}

template <typename Objective>
ProcessValue sup_over_class(const FunctionTable& cls, Objective&& objective) {
  ProcessValue best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < cls.size(); ++j) {
    const double v = objective(cls.row(j));
    if (v > best.value) best = {v, j};
  }
  return best;
}

}  // namespace detail

/// g(d) = sup_h (U_h(Z_d) − L_h(Z̄_d)).
inline ProcessValue test_train_gap(const FunctionTable& cls, const SplitPlan& split) {
  detail::check_proper_split(cls.n(), split);
  return detail::sup_over_class(
      cls, [&](std::span<const double> h) { return test_train_difference(h, split); });
}

enum class OneSidedKind {
  u_plus,   // sup_h (U − L_n)
  u_minus,  // sup_h (L_n − U)
  m_minus,  // sup_h (L_n − train mean)
};

inline ProcessValue one_sided_process(OneSidedKind kind, const FunctionTable& cls,
                                      const SplitPlan& split) {
  detail::check_proper_split(cls.n(), split);
  const double u = static_cast<double>(split.u());
  const double m = static_cast<double>(split.m());
  const double n = static_cast<double>(split.n());
  return detail::sup_over_class(cls, [&](std::span<const double> h) {
    const double total = compensated_sum(h);
    const double test = test_sum(h, split);
    const double full = total / n;
    switch (kind) {
      case OneSidedKind::u_plus:
        return test / u - full;
      case OneSidedKind::u_minus:
        return full - test / u;
      case OneSidedKind::m_minus:
        return full - (total - test) / m;
    }
    return 0.0;
  });
}

/// Classification of E(h, d, d^(i)) into the four perturbation cases.
struct PerturbationOutcome {
  double delta = 0.0;       // (U − L)(d) − (U − L)(d^(i)), evaluated directly
  int case_tag = 4;         // 1..4
  double case_value = 0.0;  // value predicted by the case formula
  std::size_t p = 0;        // first position after i where d^(i) draws Z_d(i); n+1 if none
  std::size_t q = 0;        // first position after i where d draws Z_{d^(i)}(i); n+1 if none
};

/// Positions past u are "infinite": p, q = n + 1 when the scan over (i, u]
/// finds nothing.
inline PerturbationOutcome perturbation_delta(std::span<const double> h, const DrawVector& d,
                                              std::size_t i, std::size_t d_i_new) {
  const DrawVector dp = perturb_coordinate(d, i, d_i_new);
  if (h.size() != d.n()) throw InvalidArgument("row length differs from n");
  if (d.m() == 0) throw InvalidArgument("perturbation needs m >= 1");
  const SplitPlan z = apply_draws(d);
  const SplitPlan zp = apply_draws(dp);
  const std::size_t u = d.u();
  const std::size_t none = d.n() + 1;
  const auto seq = z.test_sequence();
  const auto seqp = zp.test_sequence();

  PerturbationOutcome out;
  out.delta = test_train_difference(h, z) - test_train_difference(h, zp);
  out.p = none;
  out.q = none;
  for (std::size_t k = i + 1; k <= u; ++k) {
    if (out.p == none && seqp[k - 1] == seq[i - 1]) out.p = k;
    if (out.q == none && seq[k - 1] == seqp[i - 1]) out.q = k;
  }

  const double scale = 1.0 / static_cast<double>(u) + 1.0 / static_cast<double>(d.m());
  auto at = [&](std::size_t idx) { return h[idx - 1]; };
  const bool p_finite = out.p <= u;
  const bool q_finite = out.q <= u;
  if (d.at(i) == d_i_new || z.same_sets(zp) || (p_finite && q_finite)) {
    out.case_tag = 4;
    out.case_value = 0.0;
  } else if (q_finite) {
    out.case_tag = 1;
    out.case_value = scale * (at(seq[i - 1]) - at(seqp[out.q - 1]));
  } else if (p_finite) {
    out.case_tag = 2;
    out.case_value = scale * (at(seq[out.p - 1]) - at(seqp[i - 1]));
  } else {
    out.case_tag = 3;
    out.case_value = scale * (at(seq[i - 1]) - at(seqp[i - 1]));
  }
  return out;
}

/// Value-matching positions p(i) = min{i' ∈ (i, u] : Z_d(i') = i}, n + 1 when
/// none. Entry k holds p(k + 1).
inline std::vector<std::size_t> value_match_positions(const SplitPlan& split) {
  const std::size_t u = split.u();
  const auto seq = split.test_sequence();
  std::vector<std::size_t> p(u, split.n() + 1);
  for (std::size_t i = 1; i <= u; ++i) {
    for (std::size_t k = i + 1; k <= u; ++k) {
      if (seq[k - 1] == i) {
        p[i - 1] = k;
        break;
      }
    }
  }
  return p;
}

/// sup over {f in span K(·, x_i) : ‖f‖ <= μ} of (test mean − train mean),
/// which is μ·√(aᵀKa) with a_i = 1/u on test indices and −1/m on training ones.
inline double rkhs_ball_sup(const Eigen::MatrixXd& gram, const SplitPlan& split, double mu,
                            double psd_tolerance = 1e-8) {
  if (!(mu >= 0.0)) throw InvalidArgument("rkhs_ball_sup requires mu >= 0");
  const auto n = static_cast<Eigen::Index>(split.n());
  if (gram.rows() != n || gram.cols() != n) throw InvalidMatrix("gram matrix must be n x n");
  if (split.u() == 0 || split.m() == 0) throw InvalidArgument("split must have u, m >= 1");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > psd_tolerance * scale) {
    throw InvalidMatrix("gram matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  const double top = std::max(0.0, eig.eigenvalues().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -psd_tolerance * std::max(top, 1e-300)) {
    throw InvalidMatrix("gram matrix is not positive semidefinite");
  }
  if (mu == 0.0) return 0.0;
  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, -1.0 / static_cast<double>(split.m()));
  for (std::size_t i : split.test_set()) {
    a(static_cast<Eigen::Index>(i - 1)) = 1.0 / static_cast<double>(split.u());
  }
  const double quad = a.dot(gram * a);
  return mu * std::sqrt(std::max(0.0, quad));
}

/// E[Σ_i h(Z_{d^(i)}(i))² | d] in closed form: the replacement draw at step i is
/// uniform over the n − i + 1 indices not yet taken by d.
inline double conditional_draw_moment(std::span<const double> h, const DrawVector& d) {
  if (h.size() != d.n()) throw InvalidArgument("row length differs from n");
  const SplitPlan plan = apply_draws(d);
  const auto seq = plan.test_sequence();
  std::vector<char> taken(d.n() + 1, 0);
  CompensatedSum total;
  for (std::size_t i = 1; i <= d.u(); ++i) {
    CompensatedSum avail;
    for (std::size_t j = 1; j <= d.n(); ++j) {
      if (!taken[j]) avail.add(h[j - 1] * h[j - 1]);
    }
    total.add(avail.value() / static_cast<double>(d.n() - i + 1));
    taken[seq[i - 1]] = 1;
  }
  return total.value();
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

inline MeanEstimate summarize(std::span<const double> xs) {
  MeanEstimate e;
  e.trials = xs.size();
  if (xs.empty()) return e;
  e.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum ss;
    for (double x : xs) ss.add((x - e.mean) * (x - e.mean));
    const double var = ss.value() / static_cast<double>(xs.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return e;
}

/// Monte Carlo estimate of E[Σ_i h(Z_{d^(i)}(i))² | d] by redrawing every d'_i
/// and rerunning RANDPERM on each d^(i).
inline MeanEstimate conditional_draw_moment_mc(std::span<const double> h, const DrawVector& d,
                                               std::size_t trials, std::uint64_t seed,
                                               unsigned workers = 1) {
  if (h.size() != d.n()) throw InvalidArgument("row length differs from n");
  auto values = parallel_map<double>(trials, workers, [&](std::size_t t) {
    CounterRng rng(seed, t);
    CompensatedSum acc;
    for (std::size_t i = 1; i <= d.u(); ++i) {
      const auto replacement = static_cast<std::size_t>(rng.uniform_int(i, d.n()));
      const SplitPlan zp = apply_draws(perturb_coordinate(d, i, replacement));
      const double v = h[zp.test_sequence()[i - 1] - 1];
      acc.add(v * v);
    }
    return acc.value();
  });
  return summarize(values);
}

/// Means of f(sum of k draws) from a finite population, sampled without and
/// with replacement.
struct ConvexOrderComparison {
  MeanEstimate without_replacement;
  MeanEstimate with_replacement;
};

inline ConvexOrderComparison compare_convex_order(std::span<const double> population,
                                                  std::size_t k,
                                                  const std::function<double(double)>& f,
                                                  std::size_t trials, std::uint64_t seed,
                                                  unsigned workers = 1) {
  const std::size_t n = population.size();
  if (k == 0 || k > n) throw InvalidArgument("convex-order comparison needs 1 <= k <= n");
  auto without = parallel_map<double>(trials, workers, [&](std::size_t t) {
    CounterRng rng(seed, 2 * t);
    const auto [d, split] = randperm_prefix(n, k, rng);
    return f(test_sum(population, split));
  });
  auto with = parallel_map<double>(trials, workers, [&](std::size_t t) {
    CounterRng rng(seed, 2 * t + 1);
    CompensatedSum acc;
    for (std::size_t j = 0; j < k; ++j) acc.add(population[rng.uniform_int(0, n - 1)]);
    return f(acc.value());
  });
  return {summarize(without), summarize(with)};
}

}  // namespace tlc
