#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tlc/bounds.hpp"
#include "tlc/complexity.hpp"
#include "tlc/csv.hpp"
#include "tlc/empirical_process.hpp"
#include "tlc/error.hpp"
#include "tlc/function_class.hpp"
#include "tlc/kernel_spectral.hpp"
#include "tlc/split.hpp"
#include "tlc/subroot.hpp"
#include "tlc/table_io.hpp"

#ifndef TLC_BUILD_ID
#define TLC_BUILD_ID "unknown"
#endif

namespace tlc {

inline std::string build_id() { return TLC_BUILD_ID; }

/// Settings for every subcommand. Each command reads the fields it needs.
struct ExperimentConfig {
  std::optional<std::size_t> n;
  std::optional<std::size_t> u;
  std::size_t trials = 10'000;
  std::uint64_t seed = 0;
  std::vector<double> x{1.0};
  bool x_given = false;
  std::string class_path, losses_path, data_path, curve_path, out_path;
  std::string kernel = "linear";
  double mu = 1.0;
  double alpha = 1.0;
  unsigned workers = 1;
  std::string mode = "test-train";  // validate-concentration: test-train | sup
  std::string u_rule = "fraction:0.5";
  std::vector<std::size_t> n_grid;
  double K_peel = 2.0;
  std::optional<double> B;
  EstimationMode estimation = EstimationMode::automatic;
  std::uint64_t exact_cap = kDefaultEnumerationCap;
  std::optional<double> a, b;  // fixed-point: ψ(r) = a√r + b
  double tolerance = kDefaultFixedPointTolerance;
  ConstantOverrides constants;
  std::string build = build_id();
};

using ConfigMap = std::map<std::string, std::string>;

/// `key = value` per line, `#` starts a comment. Keys may carry a module
/// prefix such as `experiments_cli.trials`; `constants.*` keys keep theirs.
inline ConfigMap parse_config(std::istream& in, const std::string& source) {
  static const char* const kModules[] = {"core_rng_split",  "function_class",
                                         "empirical_process", "complexity_estimators",
                                         "subroot_fixed_point", "kernel_spectral",
                                         "bound_calculators", "experiments_cli"};
  ConfigMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body(trim(std::string_view(line).substr(0, hash)));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
    std::string key(trim(std::string_view(body).substr(0, eq)));
    const std::string value(trim(std::string_view(body).substr(eq + 1)));
    if (key.empty()) throw ParseError(source, lineno, "empty key");
    if (const auto dot = key.find('.'); dot != std::string::npos && key.compare(0, dot, "constants") != 0) {
      const std::string prefix = key.substr(0, dot);
      if (std::find(std::begin(kModules), std::end(kModules), prefix) == std::end(kModules)) {
        throw ParseError(source, lineno, "unknown key namespace '" + prefix + "'");
      }
      key = key.substr(dot + 1);
    }
    out[key] = value;
  }
  return out;
}

inline ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

namespace detail {

inline double config_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw ConfigError(key + ": '" + v + "' is not a number");
  return out;
}

inline std::uint64_t config_count(const std::string& key, const std::string& v) {
  const double d = config_double(key, v);
  if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e18) {
    throw ConfigError(key + ": '" + v + "' is not a nonnegative integer");
  }
  return static_cast<std::uint64_t>(d);
}

inline std::vector<double> config_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& f : split_fields(v, ',')) out.push_back(config_double(key, std::string(trim(f))));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

}  // namespace detail

/// Applies `values` on top of `cfg`. Unknown keys are rejected.
inline void apply_config(ExperimentConfig& cfg, const ConfigMap& values) {
  using namespace detail;
  for (const auto& [key, v] : values) {
    if (key == "n") {
      cfg.n = config_count(key, v);
    } else if (key == "u") {
      cfg.u = config_count(key, v);
    } else if (key == "trials") {
      cfg.trials = config_count(key, v);
    } else if (key == "seed") {
      cfg.seed = config_count(key, v);
    } else if (key == "x") {
      cfg.x = config_list(key, v);
      cfg.x_given = true;
    } else if (key == "class") {
      cfg.class_path = v;
    } else if (key == "losses") {
      cfg.losses_path = v;
    } else if (key == "data") {
      cfg.data_path = v;
    } else if (key == "curve") {
      cfg.curve_path = v;
    } else if (key == "out") {
      cfg.out_path = v;
    } else if (key == "kernel") {
      cfg.kernel = v;
    } else if (key == "mu") {
      cfg.mu = config_double(key, v);
    } else if (key == "alpha") {
      cfg.alpha = config_double(key, v);
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(config_count(key, v));
    } else if (key == "mode") {
      cfg.mode = v;
    } else if (key == "u_rule") {
      cfg.u_rule = v;
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (double d : config_list(key, v)) {
        if (!(d >= 1.0) || d != std::floor(d)) throw ConfigError("n_grid entries must be positive integers");
        cfg.n_grid.push_back(static_cast<std::size_t>(d));
      }
    } else if (key == "K_peel") {
      cfg.K_peel = config_double(key, v);
    } else if (key == "B") {
      cfg.B = config_double(key, v);
    } else if (key == "estimation") {
      if (v == "exact") cfg.estimation = EstimationMode::exact;
      else if (v == "monte_carlo") cfg.estimation = EstimationMode::monte_carlo;
      else if (v == "automatic") cfg.estimation = EstimationMode::automatic;
      else throw ConfigError("estimation must be exact, monte_carlo or automatic");
    } else if (key == "exact_cap") {
      cfg.exact_cap = config_count(key, v);
    } else if (key == "a") {
      cfg.a = config_double(key, v);
    } else if (key == "b") {
      cfg.b = config_double(key, v);
    } else if (key == "tolerance") {
      cfg.tolerance = config_double(key, v);
    } else if (key == "constants.c0") {
      cfg.constants.c0 = config_double(key, v);
    } else if (key == "constants.c1") {
      cfg.constants.c1 = config_double(key, v);
    } else if (key == "constants.c2") {
      cfg.constants.c2 = config_double(key, v);
    } else if (key == "constants.c3") {
      cfg.constants.c3 = config_double(key, v);
    } else if (key == "constants.c5") {
      cfg.constants.c5 = config_double(key, v);
    } else if (key == "constants.hat_c2") {
      cfg.constants.hat_c2 = config_double(key, v);
    } else if (key == "constants.theta") {
      cfg.constants.theta = config_double(key, v);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  for (double x : cfg.x) {
    if (!(x > 0.0)) throw ConfigError("every x must be > 0");
  }
  if (cfg.workers == 0) throw ConfigError("workers must be >= 1");
}

/// A CSV report. Every row is written with trailing seed and build columns.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_report(std::ostream& os, const Report& report, std::uint64_t seed,
                         const std::string& build) {
  for (std::size_t k = 0; k < report.header.size(); ++k) os << report.header[k] << ',';
  os << "seed,build\n";
  for (const auto& row : report.rows) {
    for (const auto& cell : row) os << cell << ',';
    os << seed << ',' << build << '\n';
  }
}

namespace detail {

inline constexpr std::uint64_t kStreamStride = std::uint64_t{1} << 40;

inline Sampling sampling_for(const ExperimentConfig& cfg, std::uint64_t lane) {
  Sampling s;
  s.mode = cfg.estimation;
  s.trials = cfg.trials;
  s.seed = cfg.seed;
  s.stream_base = lane * kStreamStride;
  s.workers = cfg.workers;
  s.exact_cap = cfg.exact_cap;
  return s;
}

inline std::size_t require_u(const ExperimentConfig& cfg, std::size_t n) {
  if (!cfg.u) throw ConfigError("u is required");
  if (*cfg.u == 0 || *cfg.u >= n) {
    throw ConfigError("u must lie in [1, n-1] (u=" + std::to_string(*cfg.u) + ", n=" + std::to_string(n) + ")");
  }
  return *cfg.u;
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

inline constexpr std::size_t kMinValidationTrials = 10'000;

/// Empirical check of the concentration bounds. Mode `test-train` tests
/// g(d) against the test-train bound; mode `sup` tests g_u(d) = sup_h U_h
/// against E[g_u] plus the sup-process bound (class must have L_n(h) = 0).
/// Rows: x,bound,violations,trials,violation_rate,e_minus_x.
inline Report run_validate_concentration(const ExperimentConfig& cfg, const FunctionTable& cls) {
  using detail::fmt;
  if (cfg.trials < kMinValidationTrials) {
    throw ConfigError("validate-concentration needs trials >= " + std::to_string(kMinValidationTrials));
  }
  const bool sup_mode = cfg.mode == "sup";
  if (!sup_mode && cfg.mode != "test-train") throw ConfigError("mode must be test-train or sup");
  const std::size_t n = cls.n();
  const std::size_t u = detail::require_u(cfg, n);
  const std::size_t m = n - u;

  BoundInputs in;
  in.u = u;
  in.m = m;
  in.n = n;
  in.H0 = cls.range_bound();
  in.complexity_h1 =
      transductive_complexity(TcKind::u_plus, squared_class(cls), std::min(u, m), detail::sampling_for(cfg, 2)).mean;
  in.complexity_h1 = std::max(0.0, in.complexity_h1);

  double expected = 0.0;
  if (sup_mode) {
    double r = 0.0;
    for (std::size_t j = 0; j < cls.size(); ++j) r = std::max(r, variance_operator(cls.row(j)));
    in.r = r;
    expected = transductive_complexity(TcKind::u_plus, cls, u, detail::sampling_for(cfg, 1)).mean;
  } else {
    in.r = fourth_moment_proxy(cls);
    expected = detail::estimate_scalar_over_splits(n, u, detail::sampling_for(cfg, 1), [&](const SplitPlan& p) {
      return test_train_gap(cls, p).value;
    }).mean;
  }

  std::vector<double> bounds;
  for (double x : cfg.x) {
    in.x = x;
    if (sup_mode) {
      bounds.push_back(expected + general_sup_bound(in, &cls));
    } else {
      in.expected_g = std::max(0.0, expected);
      bounds.push_back(concentration_deviation(in));
    }
  }

  const auto g = parallel_map<double>(cfg.trials, cfg.workers, [&](std::size_t t) {
    CounterRng rng(cfg.seed, t);
    const auto [d, plan] = randperm_prefix(n, u, rng);
    return sup_mode ? one_sided_process(OneSidedKind::u_plus, cls, plan).value
                    : test_train_gap(cls, plan).value;
  });

  Report rep{{"x", "bound", "violations", "trials", "violation_rate", "e_minus_x"}, {}};
  for (std::size_t k = 0; k < cfg.x.size(); ++k) {
    const auto violations = static_cast<std::size_t>(
        std::count_if(g.begin(), g.end(), [&](double v) { return v > bounds[k]; }));
    rep.rows.push_back({fmt(cfg.x[k]), fmt(bounds[k]), std::to_string(violations), std::to_string(cfg.trials),
                        fmt(static_cast<double>(violations) / static_cast<double>(cfg.trials)),
                        fmt(std::exp(-cfg.x[k]))});
  }
  return rep;
}

// Keeps ⌊1024^0.3⌋ = 8 despite pow rounding just below the integer.
inline constexpr double kRuleSlack = 1e-12;

/// Parses `fraction:f` (u = ⌊f·n⌋), `power:β` (u = ⌊n^β⌋) or `fixed:k`.
/// The result is clamped to [1, n-1].
inline std::size_t apply_u_rule(const std::string& rule, std::size_t n) {
  const auto colon = rule.find(':');
  double p = 0.0;
  if (colon == std::string::npos || !parse_double(std::string_view(rule).substr(colon + 1), p)) {
    throw InvalidArgument("u-rule must be fraction:<f>, power:<beta> or fixed:<k>");
  }
  const std::string kind = rule.substr(0, colon);
  const double nd = static_cast<double>(n);
  double u = 0.0;
  if (kind == "fraction" && p > 0.0 && p < 1.0) {
    u = std::floor(p * nd * (1.0 + kRuleSlack));
  } else if (kind == "power" && p > 0.0 && p < 1.0) {
    u = std::floor(std::pow(nd, p) * (1.0 + kRuleSlack));
  } else if (kind == "fixed" && p >= 1.0 && p == std::floor(p)) {
    u = p;
  } else {
    throw InvalidArgument("invalid u-rule '" + rule + "'");
  }
  if (n < 2) throw InvalidArgument("u-rule needs n >= 2");
  return static_cast<std::size_t>(std::clamp(u, 1.0, nd - 1.0));
}

struct TklRow {
  std::size_t n = 0, u = 0, m = 0;
  double tlc_value = 0.0;
  double prior_value = 0.0;
};

/// tlc_value = c5·(min_Q r(u,m,Q) + x/min{u,m}), where the x term is present
/// only when x is given. prior_value = θ(n/u·r_m* + n/m·r_u* + 1/m + 1/u) with
/// r_s* from the closed-form fixed point on the same spectrum.
inline TklRow tkl_row(const Spectrum& spec, std::size_t u, const ConstantSet& cs,
                      std::optional<double> x) {
  const std::size_t n = spec.size();
  if (u == 0 || u >= n) throw InvalidArgument("compare-tkl needs 1 <= u <= n-1");
  const std::size_t m = n - u;
  TklRow row{n, u, m, 0.0, 0.0};
  double core = min_r_umQ(spec, u, m).value;
  if (x) core += *x / static_cast<double>(std::min(u, m));
  row.tlc_value = cs.c5.value * core;
  BoundInputs in;
  in.u = u;
  in.m = m;
  in.n = n;
  row.prior_value = generic_prior_excess(in, prior_fixed_point_formula(spec, u), prior_fixed_point_formula(spec, m),
                                         cs.theta.value);
  return row;
}

/// Synthetic sweep over `n_grid` (default 2^10..2^16) with spectrum q^{-2α},
/// or a single row for a measured spectrum when one is given.
/// Rows: n,u,m,tlc_value,prior_value,ratio.
inline Report run_compare_tkl(const ExperimentConfig& cfg, const std::optional<Spectrum>& measured = std::nullopt) {
  using detail::fmt;
  ConstantSet cs;
  if (cfg.constants.c5) cs.c5 = {*cfg.constants.c5, Provenance::configured};
  if (cfg.constants.theta) cs.theta = {*cfg.constants.theta, Provenance::configured};
  if (!(cs.c5.value > 0.0) || !(cs.theta.value > 0.0)) throw ConfigError("c5 and theta must be > 0");
  std::optional<double> x;
  if (cfg.x_given) x.emplace(cfg.x.front());

  std::vector<TklRow> rows;
  if (measured) {
    const std::size_t u = cfg.u ? detail::require_u(cfg, measured->size()) : apply_u_rule(cfg.u_rule, measured->size());
    rows.push_back(tkl_row(*measured, u, cs, x));
  } else {
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be > 0");
    std::vector<std::size_t> grid = cfg.n_grid;
    if (grid.empty()) {
      for (int e = 10; e <= 16; ++e) grid.push_back(std::size_t{1} << e);
    }
    for (std::size_t n : grid) {
      rows.push_back(tkl_row(synthetic_spectrum(n, cfg.alpha), apply_u_rule(cfg.u_rule, n), cs, x));
    }
  }
  Report rep{{"n", "u", "m", "tlc_value", "prior_value", "ratio"}, {}};
  for (const auto& r : rows) {
    rep.rows.push_back({std::to_string(r.n), std::to_string(r.u), std::to_string(r.m), fmt(r.tlc_value),
                        fmt(r.prior_value), fmt(r.prior_value / r.tlc_value)});
  }
  return rep;
}

/// Per-split ERM outcome.
struct ErmResult {
  std::size_t split_id = 0;
  std::string test_indices;
  std::size_t erm_index = 0;     // argmin of the training loss
  std::size_t oracle_index = 0;  // argmin of the test loss
  double excess_risk = 0.0;
  double bound = 0.0;
};

/// Fixed points of the localized curves behind the excess-risk bound.
struct ErmFixedPoints {
  double B = 0.0;
  double r_u = 0.0;
  double r_m = 0.0;
  double r_star = 0.0;
};

inline double curve_fixed_point(const LocalizedCurve& curve, double tol) {
  return fixed_point(subroot_envelope(curve), tol).r_star;
}

/// r_u, r_m from Δ_F localized by T̃_n; r* from Δ*_F localized by B·L_n(h)
/// over the terms R⁻_u h, R⁻_m h and R⁺ h² on the smaller subset.
inline ErmFixedPoints erm_fixed_points(const LossTable& losses, std::size_t u, double B,
                                       const ExperimentConfig& cfg) {
  ErmFixedPoints fp;
  fp.B = B;
  const auto delta = difference_class(losses);
  std::vector<double> tilde(delta.table.size());
  for (std::size_t j = 0; j < tilde.size(); ++j) tilde[j] = surrogate_variance(delta.table.row(j), losses, B);
  const auto radii = breakpoint_radii(tilde);
  fp.r_u = curve_fixed_point(
      localized_curve(delta.table, tilde, CurveSide::u, u, radii, detail::sampling_for(cfg, 3)), cfg.tolerance);
  fp.r_m = curve_fixed_point(
      localized_curve(delta.table, tilde, CurveSide::m, u, radii, detail::sampling_for(cfg, 4)), cfg.tolerance);

  const auto star = excess_class(losses);
  std::vector<double> w(star.table.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::max(0.0, B * average_loss(star.table.row(j)));
  const LocalizedTerm terms[] = {{Subset::test, false, false}, {Subset::train, false, false},
                                 {Subset::smaller, true, true}};
  fp.r_star = curve_fixed_point(
      localized_sup_curve(star.table, w, u, breakpoint_radii(w), terms, detail::sampling_for(cfg, 5)),
      cfg.tolerance);
  return fp;
}

inline std::size_t argmin_over(const LossTable& losses, const std::vector<std::size_t>& idx) {
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < losses.size(); ++f) {
    CompensatedSum acc;
    for (std::size_t i : idx) acc.add(losses.row(f)[i - 1]);
    if (acc.value() < best_v) {
      best_v = acc.value();
      best = f;
    }
  }
  return best;
}

inline double subset_mean(std::span<const double> row, std::span<const std::size_t> idx) {
  CompensatedSum acc;
  for (std::size_t i : idx) acc.add(row[i - 1]);
  return acc.value() / static_cast<double>(idx.size());
}

/// Excess risk L_u(f̂_{d,m}) − L_u(f̂_{d,u}) for one split.
inline ErmResult erm_on_split(const LossTable& losses, const SplitPlan& plan) {
  const std::vector<std::size_t> test(plan.test_set().begin(), plan.test_set().end());
  const std::vector<std::size_t> train(plan.train_set().begin(), plan.train_set().end());
  ErmResult r;
  r.test_indices = join_test_indices(plan);
  r.erm_index = argmin_over(losses, train);
  r.oracle_index = argmin_over(losses, test);
  r.excess_risk = subset_mean(losses.row(r.erm_index), test) - subset_mean(losses.row(r.oracle_index), test);
  return r;
}

struct ErmRun {
  ErmFixedPoints fixed_points;
  ConstantSet constants;
  std::vector<ErmResult> results;
};

/// All splits when C(n,u) fits the enumeration cap (and estimation is not
/// forced to Monte Carlo), otherwise `trials` sampled splits. The bound uses
/// the first x.
inline ErmRun run_erm_experiment(const ExperimentConfig& cfg, const LossTable& losses) {
  const std::size_t n = losses.n();
  const std::size_t u = detail::require_u(cfg, n);
  const double B = cfg.B ? *cfg.B : estimate_B(losses);
  if (!std::isfinite(B)) throw ConfigError("measured B is infinite: some excess loss has L_n = 0 and T_n > 0");
  if (!(cfg.K_peel > B)) {
    throw ConfigError("K_peel = " + format_double(cfg.K_peel) + " must exceed B = " + format_double(B));
  }
  if (!(cfg.K_peel > 1.0)) throw ConfigError("K_peel must be > 1");

  ErmRun run;
  run.constants = resolve_constants(cfg.K_peel, losses.range_bound(), B, cfg.constants);
  run.fixed_points = erm_fixed_points(losses, u, B, cfg);

  BoundInputs in;
  in.u = u;
  in.m = n - u;
  in.n = n;
  in.x = cfg.x.front();
  in.K_peel = cfg.K_peel;
  in.B = B;
  in.H0 = losses.range_bound();
  in.r_u = run.fixed_points.r_u;
  in.r_m = run.fixed_points.r_m;
  in.r_star = run.fixed_points.r_star;
  const double bound = excess_risk_bound(in, run.constants);

  const Sampling s = detail::sampling_for(cfg, 0);
  if (detail::use_exact(s, binomial(n, u))) {
    for_each_split(n, u, [&](const SplitPlan& plan) {
      run.results.push_back(erm_on_split(losses, plan));
    }, s.exact_cap);
  } else {
    if (cfg.trials == 0) throw ConfigError("erm needs trials >= 1");
    run.results = parallel_map<ErmResult>(cfg.trials, cfg.workers, [&](std::size_t t) {
      CounterRng rng(cfg.seed, t);
      return erm_on_split(losses, randperm_prefix(n, u, rng).second);
    });
  }
  for (std::size_t k = 0; k < run.results.size(); ++k) {
    run.results[k].split_id = k + 1;
    run.results[k].bound = bound;
  }
  return run;
}

/// Rows: split,test_indices,erm_index,oracle_index,excess_risk,bound.
inline Report erm_report(const ErmRun& run) {
  Report rep{{"split", "test_indices", "erm_index", "oracle_index", "excess_risk", "bound"}, {}};
  for (const auto& r : run.results) {
    rep.rows.push_back({std::to_string(r.split_id), r.test_indices, std::to_string(r.erm_index),
                        std::to_string(r.oracle_index), detail::fmt(r.excess_risk), detail::fmt(r.bound)});
  }
  return rep;
}

inline constexpr double kComparisonSlack = 1e-12;

/// The four transductive complexities against twice the inductive Rademacher
/// complexity at the same subset size.
/// Rows: kind,mean,stderr,mode,twice_inductive,inductive_stderr,symmetrization_pass.
inline Report run_complexity_report(const ExperimentConfig& cfg, const FunctionTable& cls) {
  using detail::fmt;
  const std::size_t n = cls.n();
  const std::size_t u = detail::require_u(cfg, n);
  const std::size_t m = n - u;
  const auto ind_u = inductive_rademacher(cls, u, detail::sampling_for(cfg, 10));
  const auto ind_m = u == m ? ind_u : inductive_rademacher(cls, m, detail::sampling_for(cfg, 11));

  Report rep{{"kind", "mean", "stderr", "mode", "twice_inductive", "inductive_stderr", "symmetrization_pass"}, {}};
  const TcKind kinds[] = {TcKind::u_plus, TcKind::u_minus, TcKind::m_plus, TcKind::m_minus};
  std::uint64_t lane = 12;
  for (TcKind kind : kinds) {
    const auto e = transductive_complexity(kind, cls, u, detail::sampling_for(cfg, lane++));
    const auto& ind = (kind == TcKind::u_plus || kind == TcKind::u_minus) ? ind_u : ind_m;
    const double slack = 4.0 * std::hypot(e.std_error, 2.0 * ind.std_error) + kComparisonSlack;
    const bool pass = e.mean <= 2.0 * ind.mean + slack;
    rep.rows.push_back({to_string(kind), fmt(e.mean), fmt(e.std_error), mode_name(e), fmt(2.0 * ind.mean),
                        fmt(ind.std_error), pass ? "true" : "false"});
  }
  return rep;
}

/// ψ(r) = a√r + b, or the sub-root envelope of a curve file.
/// Row: r_star,residual,iterations.
inline Report run_fixed_point(const ExperimentConfig& cfg, const std::optional<LocalizedCurve>& curve) {
  if (!curve && !cfg.a && !cfg.b) throw ConfigError("fixed-point needs a curve file or a/b");
  const SubRootFn psi = curve ? subroot_envelope(*curve) : power_subroot(cfg.a.value_or(0.0), cfg.b.value_or(0.0));
  const auto fp = fixed_point(psi, cfg.tolerance);
  return {{"r_star", "residual", "iterations"},
          {{detail::fmt(fp.r_star), detail::fmt(fp.residual), std::to_string(fp.iterations)}}};
}

/// Rows: q,lambda_hat,tail_sum.
inline Report spectrum_report(const Spectrum& s) {
  Report rep{{"q", "lambda_hat", "tail_sum"}, {}};
  for (std::size_t q = 1; q <= s.size(); ++q) {
    rep.rows.push_back({std::to_string(q), detail::fmt(s.eigenvalues()[q - 1]), detail::fmt(s.tail(q))});
  }
  return rep;
}

}  // namespace tlc
