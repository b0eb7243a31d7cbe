#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlc/error.hpp"
#include "tlc/summation.hpp"

namespace tlc {

/// 2√2, the smallest admissible range bound.
inline constexpr double kRangeFloor = 2.0 * std::numbers::sqrt2;

/// max{2√2, raw_max}.
inline double h0_floor(double raw_max) {
  if (!(raw_max >= 0.0)) throw InvalidArgument("h0_floor requires raw_max >= 0");
  return std::max(kRangeFloor, raw_max);
}

/// L_n(h) = (1/n) Σ h(i).
inline double average_loss(std::span<const double> h) {
  if (h.empty()) throw InvalidArgument("average_loss of an empty row");
  return compensated_sum(h) / static_cast<double>(h.size());
}

/// T_n(h) = (1/n) Σ h(i)².
inline double variance_operator(std::span<const double> h) {
  if (h.empty()) throw InvalidArgument("variance_operator of an empty row");
  return compensated_sum_of(h, [](double v) { return v * v; }) / static_cast<double>(h.size());
}

/// A finite class tabulated over the full sample: values[j][i] = h_j(i).
class FunctionTable {
 public:
  /// `values` is row-major M×n. `declared_range` can only raise the computed
  /// bound max{2√2, max|h(i)|}.
  FunctionTable(std::size_t n, std::vector<double> values, std::vector<std::string> names = {},
                std::optional<double> declared_range = std::nullopt)
      : n_(n), values_(std::move(values)), names_(std::move(names)) {
    if (n_ == 0) throw InvalidClass("function table needs n >= 1");
    if (values_.empty() || values_.size() % n_ != 0) {
      throw InvalidClass("function table needs M >= 1 full rows of length n=" + std::to_string(n_));
    }
    double raw = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidClass("function table holds a non-finite value");
      raw = std::max(raw, std::abs(v));
    }
    range_bound_ = h0_floor(raw);
    if (declared_range) range_bound_ = std::max(range_bound_, *declared_range);
    if (!names_.empty() && names_.size() != size()) {
      throw InvalidClass("function table names do not match the row count");
    }
  }

  static FunctionTable from_rows(const std::vector<std::vector<double>>& rows,
                                 std::optional<double> declared_range = std::nullopt) {
    if (rows.empty()) throw InvalidClass("function table needs M >= 1");
    const std::size_t n = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw InvalidClass("ragged function table");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return FunctionTable(n, std::move(flat), {}, declared_range);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size() / n_; }
  double range_bound() const noexcept { return range_bound_; }

  std::span<const double> row(std::size_t j) const {
    if (j >= size()) throw InvalidArgument("function index out of range");
    return std::span<const double>(values_).subspan(j * n_, n_);
  }

  /// h_j(i) with 1-based i.
  double at(std::size_t j, std::size_t i) const { return values_[j * n_ + (i - 1)]; }

  std::string name(std::size_t j) const {
    return names_.empty() ? "h" + std::to_string(j) : names_.at(j);
  }

  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
  std::vector<std::string> names_;
  double range_bound_ = kRangeFloor;
};

/// sup_h T_n(h²) = sup_h (1/n) Σ h(i)⁴.
inline double fourth_moment_proxy(const FunctionTable& cls) {
  double best = 0.0;
  for (std::size_t j = 0; j < cls.size(); ++j) {
    const double v = compensated_sum_of(cls.row(j), [](double x) { return x * x * x * x; }) /
                     static_cast<double>(cls.n());
    best = std::max(best, v);
  }
  return best;
}

/// H_1 = {h² : h ∈ H}, with range bound max{2√2, H0²}.
inline FunctionTable squared_class(const FunctionTable& cls) {
  std::vector<double> sq(cls.values().begin(), cls.values().end());
  for (double& v : sq) v *= v;
  const double h0 = cls.range_bound();
  std::vector<std::string> names;
  names.reserve(cls.size());
  for (std::size_t j = 0; j < cls.size(); ++j) names.push_back(cls.name(j) + "^2");
  return FunctionTable(cls.n(), std::move(sq), std::move(names), h0_floor(h0 * h0));
}

/// Per-candidate losses over the full sample, loss[f][i] = ℓ_f(i) in [0, L0].
class LossTable {
 public:
  LossTable(std::size_t n, std::vector<double> losses, std::vector<std::string> names = {},
            std::optional<double> declared_range = std::nullopt)
      : table_(n, std::move(losses), std::move(names), declared_range) {
    for (double v : table_.values()) {
      if (v < 0.0) throw InvalidClass("losses must be nonnegative");
    }
    means_.resize(size());
    for (std::size_t f = 0; f < size(); ++f) {
      means_[f] = average_loss(table_.row(f));
      if (means_[f] < means_[star_index_]) star_index_ = f;
    }
  }

  static LossTable from_rows(const std::vector<std::vector<double>>& rows,
                             std::optional<double> declared_range = std::nullopt) {
    auto t = FunctionTable::from_rows(rows);
    return LossTable(t.n(), std::vector<double>(t.values().begin(), t.values().end()), {},
                     declared_range);
  }

  std::size_t n() const noexcept { return table_.n(); }
  std::size_t size() const noexcept { return table_.size(); }
  double range_bound() const noexcept { return table_.range_bound(); }
  /// Index of f*_n, the full-sample minimizer (lowest index on ties).
  std::size_t star_index() const noexcept { return star_index_; }
  std::span<const double> row(std::size_t f) const { return table_.row(f); }
  /// L_n(ℓ_f).
  double mean(std::size_t f) const { return means_.at(f); }
  std::string name(std::size_t f) const { return table_.name(f); }
  const FunctionTable& table() const noexcept { return table_; }

 private:
  FunctionTable table_;
  std::vector<double> means_;
  std::size_t star_index_ = 0;
};

/// h = ℓ_{f1} − ℓ_{f2}.
/// min((f(i) − y_i)², L0) for each candidate prediction row f.
inline LossTable clipped_squared_loss(const std::vector<std::vector<double>>& predictions,
                                      std::span<const double> targets, double L0) {
  if (!(L0 > 0.0)) throw InvalidArgument("L0 must be > 0");
  std::vector<std::vector<double>> rows;
  rows.reserve(predictions.size());
  for (const auto& f : predictions) {
    if (f.size() != targets.size()) throw InvalidClass("prediction row length differs from targets");
    std::vector<double> row(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double e = f[i] - targets[i];
      row[i] = std::min(e * e, L0);
    }
    rows.push_back(std::move(row));
  }
  return LossTable::from_rows(rows, L0);
}

struct DifferencePair {
  std::size_t f1 = 0;
  std::size_t f2 = 0;
  std::vector<double> row;
};

inline DifferencePair make_difference(const LossTable& losses, std::size_t f1, std::size_t f2) {
  DifferencePair p{f1, f2, std::vector<double>(losses.n())};
  const auto a = losses.row(f1);
  const auto b = losses.row(f2);
  for (std::size_t i = 0; i < losses.n(); ++i) p.row[i] = a[i] - b[i];
  return p;
}

/// A derived class with the loss pair behind each row.
struct DifferenceClass {
  FunctionTable table;
  std::vector<DifferencePair> pairs;
};

namespace detail {
inline DifferenceClass assemble(const LossTable& losses, std::vector<DifferencePair> pairs) {
  std::vector<double> flat;
  std::vector<std::string> names;
  flat.reserve(pairs.size() * losses.n());
  for (const auto& p : pairs) {
    flat.insert(flat.end(), p.row.begin(), p.row.end());
    names.push_back(losses.name(p.f1) + "-" + losses.name(p.f2));
  }
  return DifferenceClass{FunctionTable(losses.n(), std::move(flat), std::move(names)),
                         std::move(pairs)};
}
}  // namespace detail

/// Δ_F over all ordered pairs (f1, f2).
inline DifferenceClass difference_class(const LossTable& losses) {
  std::vector<DifferencePair> pairs;
  pairs.reserve(losses.size() * losses.size());
  for (std::size_t a = 0; a < losses.size(); ++a) {
    for (std::size_t b = 0; b < losses.size(); ++b) pairs.push_back(make_difference(losses, a, b));
  }
  return detail::assemble(losses, std::move(pairs));
}

/// Δ*_F = {ℓ_f − ℓ_{f*}}.
inline DifferenceClass excess_class(const LossTable& losses) {
  std::vector<DifferencePair> pairs;
  pairs.reserve(losses.size());
  for (std::size_t f = 0; f < losses.size(); ++f) {
    pairs.push_back(make_difference(losses, f, losses.star_index()));
  }
  return detail::assemble(losses, std::move(pairs));
}

inline constexpr double kRowMatchTolerance = 1e-12;

/// T̃_n(h): the infimum of 2B·L_n(ℓ_{f1} − ℓ_{f*}) + 2B·L_n(ℓ_{f2} − ℓ_{f*}) over
/// every pair with ℓ_{f1} − ℓ_{f2} = h (entrywise within `tol`).
inline double surrogate_variance(std::span<const double> target, const LossTable& losses, double B,
                                 double tol = kRowMatchTolerance) {
  if (!(B >= 0.0)) throw InvalidArgument("surrogate_variance requires B >= 0");
  if (target.size() != losses.n()) throw InvalidArgument("target row length differs from n");
  const double star_mean = losses.mean(losses.star_index());
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t a = 0; a < losses.size(); ++a) {
    const auto ra = losses.row(a);
    for (std::size_t b = 0; b < losses.size(); ++b) {
      const auto rb = losses.row(b);
      bool match = true;
      for (std::size_t i = 0; i < losses.n() && match; ++i) {
        match = std::abs((ra[i] - rb[i]) - target[i]) <= tol;
      }
      if (!match) continue;
      found = true;
      // L_n is linear, so L_n(ℓ_f − ℓ_{f*}) = L_n(ℓ_f) − L_n(ℓ_{f*}).
      const double value =
          2.0 * B * (losses.mean(a) - star_mean) + 2.0 * B * (losses.mean(b) - star_mean);
      best = std::min(best, value);
    }
  }
  if (!found) throw NotRepresentable("row is not a difference of two tabulated losses");
  return std::max(0.0, best);
}

/// Smallest B with T_n(h) <= B·L_n(h) on Δ*_F. Zero rows are skipped; a
/// nonzero row with L_n(h) = 0 makes B infinite.
inline double estimate_B(const LossTable& losses) {
  double B = 0.0;
  const std::size_t star = losses.star_index();
  for (std::size_t f = 0; f < losses.size(); ++f) {
    if (f == star) continue;
    const auto h = make_difference(losses, f, star);
    const double t = variance_operator(h.row);
    if (t == 0.0) continue;
    const double l = average_loss(h.row);
    if (l <= 0.0) return std::numeric_limits<double>::infinity();
    B = std::max(B, t / l);
  }
  return B;
}

}  // namespace tlc
