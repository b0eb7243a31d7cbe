#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tlc/csv.hpp"
#include "tlc/empirical_process.hpp"
#include "tlc/error.hpp"
#include "tlc/function_class.hpp"
#include "tlc/parallel.hpp"
#include "tlc/rng.hpp"
#include "tlc/split.hpp"
#include "tlc/subroot.hpp"
#include "tlc/summation.hpp"

namespace tlc {

enum class EstimationMode { exact, monte_carlo, automatic };

/// How an expectation over splits (or over inductive draws) is computed.
/// Monte Carlo trial t uses substream (seed, stream_base + t).
struct Sampling {
  EstimationMode mode = EstimationMode::automatic;
  std::size_t trials = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  unsigned workers = 1;
  std::uint64_t exact_cap = kDefaultEnumerationCap;
};

struct ComplexityEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  std::uint64_t trials = 0;  // C(n, u) in exact mode
  bool exact = false;
};

inline std::string mode_name(const ComplexityEstimate& e) {
  return e.exact ? "exact" : "monte_carlo";
}

namespace detail {

inline bool use_exact(const Sampling& s, std::uint64_t count) {
  switch (s.mode) {
    case EstimationMode::exact:
      if (count > s.exact_cap) {
        throw ResourceLimit("exact enumeration needs " + std::to_string(count) +
                            " configurations, above the cap " + std::to_string(s.exact_cap));
      }
      return true;
    case EstimationMode::monte_carlo:
      return false;
    case EstimationMode::automatic:
      return count <= s.exact_cap;
  }
  return false;
}

inline void check_trials(const Sampling& s) {
  if (s.trials == 0) throw InvalidArgument("Monte Carlo estimation needs trials >= 1");
}

/// Expectations of `width` per-split statistics. `fn(split, out)` fills `out`.
template <typename Fn>
std::vector<ComplexityEstimate> estimate_over_splits(std::size_t n, std::size_t u,
                                                     const Sampling& s, std::size_t width,
                                                     Fn&& fn) {
  std::vector<ComplexityEstimate> est(width);
  if (use_exact(s, binomial(n, u))) {
    std::vector<CompensatedSum> acc(width);
    std::vector<double> buf(width);
    std::uint64_t count = 0;
    for_each_split(n, u, [&](const SplitPlan& plan) {
      fn(plan, std::span<double>(buf));
      for (std::size_t k = 0; k < width; ++k) acc[k].add(buf[k]);
      ++count;
    }, s.exact_cap);
    for (std::size_t k = 0; k < width; ++k) {
      est[k] = {acc[k].value() / static_cast<double>(count), 0.0, count, true};
    }
    return est;
  }
  check_trials(s);
  auto rows = parallel_map<std::vector<double>>(s.trials, s.workers, [&](std::size_t t) {
    CounterRng rng(s.seed, s.stream_base + t);
    const auto [d, plan] = randperm_prefix(n, u, rng);
    std::vector<double> out(width);
    fn(plan, std::span<double>(out));
    return out;
  });
  std::vector<double> column(s.trials);
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t t = 0; t < s.trials; ++t) column[t] = rows[t][k];
    const auto e = summarize(column);
    est[k] = {e.mean, e.std_error, s.trials, false};
  }
  return est;
}

template <typename Fn>
ComplexityEstimate estimate_scalar_over_splits(std::size_t n, std::size_t u, const Sampling& s,
                                               Fn&& fn) {
  return estimate_over_splits(n, u, s, 1, [&](const SplitPlan& plan, std::span<double> out) {
    out[0] = fn(plan);
  })[0];
}

inline void check_transductive_u(std::size_t n, std::size_t u) {
  if (u == 0 || u >= n) {
    throw InvalidArgument("transductive estimators need 1 <= u <= n-1 (u=" + std::to_string(u) +
                          ", n=" + std::to_string(n) + ")");
  }
}

}  // namespace detail

/// The four signed transductive complexities.
enum class TcKind { u_plus, u_minus, m_plus, m_minus };

inline std::string to_string(TcKind k) {
  switch (k) {
    case TcKind::u_plus: return "u+";
    case TcKind::u_minus: return "u-";
    case TcKind::m_plus: return "m+";
    case TcKind::m_minus: return "m-";
  }
  return "?";
}

/// Deviation of a subset mean from the full-sample mean: the test mean for
/// u±, the training mean for m±, negated for the minus kinds.
inline double signed_deviation(TcKind kind, double test_total, double row_total, std::size_t u,
                               std::size_t n) {
  const double full = row_total / static_cast<double>(n);
  const bool on_test = kind == TcKind::u_plus || kind == TcKind::u_minus;
  const double subset_mean = on_test ? test_total / static_cast<double>(u)
                                     : (row_total - test_total) / static_cast<double>(n - u);
  const bool plus = kind == TcKind::u_plus || kind == TcKind::m_plus;
  return plus ? subset_mean - full : full - subset_mean;
}

/// E_d sup_h R^±_{·,d} h.
inline ComplexityEstimate transductive_complexity(TcKind kind, const FunctionTable& cls,
                                                  std::size_t u, const Sampling& sampling) {
  detail::check_transductive_u(cls.n(), u);
  std::vector<double> totals(cls.size());
  for (std::size_t j = 0; j < cls.size(); ++j) totals[j] = compensated_sum(cls.row(j));
  return detail::estimate_scalar_over_splits(cls.n(), u, sampling, [&](const SplitPlan& plan) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cls.size(); ++j) {
      best = std::max(best, signed_deviation(kind, test_sum(cls.row(j), plan), totals[j], u, cls.n()));
    }
    return best;
  });
}

/// E sup_h (1/k) Σ σ_i h(Y_i) with Y_i uniform on [n] with replacement.
/// Exact mode enumerates all n^k · 2^k configurations.
inline ComplexityEstimate inductive_rademacher(const FunctionTable& cls, std::size_t k,
                                               const Sampling& sampling) {
  if (k == 0) throw InvalidArgument("inductive Rademacher complexity needs k >= 1");
  const std::size_t n = cls.n();
  const std::size_t M = cls.size();
  const double kd = static_cast<double>(k);

  auto sup_at = [&](std::span<const std::size_t> ys, std::span<const int> sigma) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < M; ++j) {
      const auto row = cls.row(j);
      CompensatedSum acc;
      for (std::size_t t = 0; t < k; ++t) acc.add(sigma[t] * row[ys[t]]);
      best = std::max(best, acc.value() / kd);
    }
    return best;
  };

  // n^k · 2^k, saturating.
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < k && count != UINT64_MAX; ++t) {
    const detail::u128 next = static_cast<detail::u128>(count) * (2 * n);
    count = next > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(next);
  }

  if (detail::use_exact(sampling, count)) {
    std::vector<std::size_t> ys(k, 0);
    std::vector<int> sigma(k);
    CompensatedSum acc;
    const std::uint64_t sign_patterns = std::uint64_t{1} << k;
    while (true) {
      for (std::uint64_t bits = 0; bits < sign_patterns; ++bits) {
        for (std::size_t t = 0; t < k; ++t) sigma[t] = ((bits >> t) & 1u) ? 1 : -1;
        acc.add(sup_at(ys, sigma));
      }
      std::size_t pos = 0;
      while (pos < k && ++ys[pos] == n) ys[pos++] = 0;
      if (pos == k) break;
    }
    return {acc.value() / static_cast<double>(count), 0.0, count, true};
  }
  detail::check_trials(sampling);
  auto values = parallel_map<double>(sampling.trials, sampling.workers, [&](std::size_t t) {
    CounterRng rng(sampling.seed, sampling.stream_base + t);
    std::vector<std::size_t> ys(k);
    std::vector<int> sigma(k);
    for (std::size_t i = 0; i < k; ++i) {
      ys[i] = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
      sigma[i] = rng.sign();
    }
    return sup_at(ys, sigma);
  });
  const auto e = summarize(values);
  return {e.mean, e.std_error, sampling.trials, false};
}

/// Estimates of a localized complexity on an ascending grid of radii.
struct LocalizedCurve {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> std_errors;
  bool exact = false;
};

/// Which random subset a localized term averages over.
enum class Subset {
  test,        // Z_d, size u
  train,       // complement, size m
  smaller,     // whichever of the two has min{u, m} elements
};

/// One expectation inside a localization condition: E sup over the
/// sub-class of R^{sign}_{subset} applied to h (or h²).
struct LocalizedTerm {
  Subset subset = Subset::test;
  bool plus = true;
  bool squared = false;
};

/// ψ̂(r) = max over `terms` of E sup_{h : weight(h) <= r} term(h). All radii
/// share each split. A sup over an empty sub-class is 0; estimates are
/// clamped at 0 since every expectation here is nonnegative.
inline LocalizedCurve localized_sup_curve(const FunctionTable& cls, std::span<const double> weights,
                                          std::size_t u, std::span<const double> radii,
                                          std::span<const LocalizedTerm> terms,
                                          const Sampling& sampling) {
  detail::check_transductive_u(cls.n(), u);
  if (weights.size() != cls.size()) throw InvalidArgument("one weight per function is required");
  if (terms.empty()) throw InvalidArgument("localized curve needs at least one term");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw InvalidArgument("radii must be positive and strictly ascending");
    }
  }
  const std::size_t n = cls.n();
  const std::size_t M = cls.size();
  const std::size_t m = n - u;

  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });
  std::vector<std::size_t> admitted(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    admitted[k] = static_cast<std::size_t>(
        std::count_if(weights.begin(), weights.end(), [&](double w) { return w <= radii[k]; }));
  }

  std::vector<double> totals(M), sq_totals(M);
  std::vector<double> squares(cls.values().begin(), cls.values().end());
  for (double& v : squares) v *= v;
  for (std::size_t j = 0; j < M; ++j) {
    totals[j] = compensated_sum(cls.row(j));
    sq_totals[j] = compensated_sum(std::span<const double>(squares).subspan(j * n, n));
  }

  const std::size_t width = terms.size() * radii.size();
  auto est = detail::estimate_over_splits(n, u, sampling, width, [&](const SplitPlan& plan,
                                                                      std::span<double> out) {
    std::vector<double> prefix(M);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      const bool on_test = term.subset == Subset::test || (term.subset == Subset::smaller && u <= m);
      TcKind kind = on_test ? (term.plus ? TcKind::u_plus : TcKind::u_minus)
                            : (term.plus ? TcKind::m_plus : TcKind::m_minus);
      double running = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < M; ++r) {
        const std::size_t j = order[r];
        const double value =
            term.squared
                ? signed_deviation(kind, test_sum(std::span<const double>(squares).subspan(j * n, n), plan),
                                   sq_totals[j], u, n)
                : signed_deviation(kind, test_sum(cls.row(j), plan), totals[j], u, n);
        running = std::max(running, value);
        prefix[r] = running;
      }
      for (std::size_t k = 0; k < radii.size(); ++k) {
        out[t * radii.size() + k] = admitted[k] == 0 ? 0.0 : prefix[admitted[k] - 1];
      }
    }
  });

  LocalizedCurve curve;
  curve.radii.assign(radii.begin(), radii.end());
  curve.values.assign(radii.size(), 0.0);
  curve.std_errors.assign(radii.size(), 0.0);
  curve.exact = !est.empty() && est.front().exact;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double best = -std::numeric_limits<double>::infinity();
    double se = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& e = est[t * radii.size() + k];
      if (e.mean > best) {
        best = e.mean;
        se = e.std_error;
      }
    }
    curve.values[k] = std::max(0.0, best);
    curve.std_errors[k] = se;
  }
  return curve;
}

enum class CurveSide { u, m };

/// Side u: max{E sup R⁺_u h, E sup R⁺_u h²}. Side m: max{E sup R⁻_m h,
/// E sup R⁺_m h²}. Suprema run over {h : tilde_T(h) <= r}. Without
/// `include_squares` only the first term is used.
inline LocalizedCurve localized_curve(const FunctionTable& cls, std::span<const double> tilde_T,
                                      CurveSide side, std::size_t u, std::span<const double> radii,
                                      const Sampling& sampling, bool include_squares = true) {
  std::vector<LocalizedTerm> terms;
  if (side == CurveSide::u) {
    terms.push_back({Subset::test, true, false});
    if (include_squares) terms.push_back({Subset::test, true, true});
  } else {
    terms.push_back({Subset::train, false, false});
    if (include_squares) terms.push_back({Subset::train, true, true});
  }
  return localized_sup_curve(cls, tilde_T, u, radii, terms, sampling);
}

/// Radii at which a localized curve can change: each distinct positive weight,
/// preceded by a small radius that admits the zero-weight functions.
inline std::vector<double> breakpoint_radii(std::span<const double> weights) {
  std::vector<double> r;
  for (double w : weights) {
    if (w > 0.0) r.push_back(w);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  const double first = r.empty() ? 1.0 : r.front();
  r.insert(r.begin(), std::min(1e-12, first * 1e-6));
  return r;
}

/// Smallest sub-root majorant of the curve points: max_j f_j with f_j(r) = v_j
/// for r >= r_j and v_j·√(r/r_j) below.
inline SubRootFn subroot_envelope(const LocalizedCurve& curve) {
  if (curve.radii.empty() || curve.radii.size() != curve.values.size()) {
    throw InvalidArgument("subroot_envelope needs a nonempty curve");
  }
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    if (!(curve.values[k] >= 0.0)) throw InvalidArgument("curve values must be nonnegative");
    if (!(curve.radii[k] > 0.0)) throw InvalidArgument("curve radii must be positive");
  }
  return SubRootFn([radii = curve.radii, values = curve.values](double r) {
    double best = 0.0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double f = r >= radii[k] ? values[k] : values[k] * std::sqrt(std::max(r, 0.0) / radii[k]);
      best = std::max(best, f);
    }
    return best;
  });
}

/// CSV with header `r,psi_hat,stderr`.
inline void write_curve_csv(std::ostream& os, const LocalizedCurve& curve) {
  os << "r,psi_hat,stderr\n";
  for (std::size_t k = 0; k < curve.radii.size(); ++k) {
    os << format_double(curve.radii[k]) << ',' << format_double(curve.values[k]) << ','
       << format_double(curve.std_errors[k]) << '\n';
  }
}

/// Reads `r,psi_hat[,stderr]` rows; a header line is skipped.
inline LocalizedCurve read_curve_csv(std::istream& in, const std::string& source) {
  LocalizedCurve curve;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body, ',');
    double r = 0.0, v = 0.0, se = 0.0;
    if (fields.size() < 2 || !parse_double(fields[0], r) || !parse_double(fields[1], v)) {
      if (curve.radii.empty() && trim(fields[0]) == "r") continue;
      throw ParseError(source, lineno, "expected numeric r,psi_hat");
    }
    if (fields.size() > 2 && !parse_double(fields[2], se)) {
      throw ParseError(source, lineno, "stderr is not numeric");
    }
    if (!(r > 0.0) || (!curve.radii.empty() && !(r > curve.radii.back()))) {
      throw ParseError(source, lineno, "radii must be positive and strictly ascending");
    }
    if (!(v >= 0.0)) throw ParseError(source, lineno, "psi_hat must be >= 0");
    curve.radii.push_back(r);
    curve.values.push_back(v);
    curve.std_errors.push_back(se);
  }
  if (curve.radii.empty()) throw ParseError(source, lineno, "curve has no points");
  return curve;
}

}  // namespace tlc
