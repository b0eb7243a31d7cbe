#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlc/error.hpp"
#include "tlc/rng.hpp"

namespace tlc {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  detail::u128 acc = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    acc = acc * (n - k + j) / j;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(acc);
}

/// The draws d_1..d_u of RANDPERM. Entries are 1-based with i <= d_i <= n.
class DrawVector {
 public:
  DrawVector(std::size_t n, std::vector<std::size_t> entries) : n_(n), entries_(std::move(entries)) {
    if (entries_.empty() || entries_.size() > n_) {
      throw InvalidArgument("draw vector length must satisfy 1 <= u <= n (u=" +
                            std::to_string(entries_.size()) + ", n=" + std::to_string(n_) + ")");
    }
    for (std::size_t i = 1; i <= entries_.size(); ++i) {
      const std::size_t d = entries_[i - 1];
      if (d < i || d > n_) {
        throw InvalidArgument("draw d_" + std::to_string(i) + "=" + std::to_string(d) +
                              " outside [" + std::to_string(i) + ", " + std::to_string(n_) + "]");
      }
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t u() const noexcept { return entries_.size(); }
  std::size_t m() const noexcept { return n_ - entries_.size(); }

  /// d_i, 1-based.
  std::size_t at(std::size_t i) const { return entries_.at(i - 1); }
  std::span<const std::size_t> entries() const noexcept { return entries_; }

  friend bool operator==(const DrawVector&, const DrawVector&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> entries_;
};

/// A transductive split of [1, n] into u test and m = n - u training indices.
/// All indices are 1-based.
class SplitPlan {
 public:
  /// `test_sequence` must hold distinct indices in [1, n].
  SplitPlan(std::size_t n, std::vector<std::size_t> test_sequence)
      : n_(n), test_sequence_(std::move(test_sequence)) {
    std::vector<char> seen(n_ + 1, 0);
    for (std::size_t z : test_sequence_) {
      if (z < 1 || z > n_ || seen[z]) {
        throw InvalidArgument("test sequence entries must be distinct indices in [1, n]");
      }
      seen[z] = 1;
    }
    test_set_ = test_sequence_;
    std::sort(test_set_.begin(), test_set_.end());
    train_set_.reserve(n_ - test_set_.size());
    for (std::size_t i = 1; i <= n_; ++i) {
      if (!seen[i]) train_set_.push_back(i);
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t u() const noexcept { return test_sequence_.size(); }
  std::size_t m() const noexcept { return train_set_.size(); }

  /// Z_d in draw order.
  std::span<const std::size_t> test_sequence() const noexcept { return test_sequence_; }
  /// {Z_d}, ascending.
  std::span<const std::size_t> test_set() const noexcept { return test_set_; }
  /// [n] \ {Z_d}, ascending.
  std::span<const std::size_t> train_set() const noexcept { return train_set_; }

  bool same_sets(const SplitPlan& other) const noexcept {
    return n_ == other.n_ && test_set_ == other.test_set_;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> test_sequence_;
  std::vector<std::size_t> test_set_;
  std::vector<std::size_t> train_set_;
};

/// Runs RANDPERM with the given draws: I = [n]; for i = 1..u, Z(i) = I(d_i)
/// then swap I(i) and I(d_i).
inline SplitPlan apply_draws(const DrawVector& d) {
  std::vector<std::size_t> pool(d.n());
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  std::vector<std::size_t> z(d.u());
  for (std::size_t i = 1; i <= d.u(); ++i) {
    const std::size_t di = d.at(i);
    z[i - 1] = pool[di - 1];
    std::swap(pool[i - 1], pool[di - 1]);
  }
  return SplitPlan(d.n(), std::move(z));
}

inline DrawVector sample_draws(std::size_t n, std::size_t u, CounterRng& rng) {
  if (u == 0 || u > n) {
    throw InvalidArgument("randperm requires 1 <= u <= n (u=" + std::to_string(u) +
                          ", n=" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> d(u);
  for (std::size_t i = 1; i <= u; ++i) {
    d[i - 1] = static_cast<std::size_t>(rng.uniform_int(i, n));
  }
  return DrawVector(n, std::move(d));
}

/// First u elements of a uniformly random permutation of [n], with the draws
/// that produced them.
inline std::pair<DrawVector, SplitPlan> randperm_prefix(std::size_t n, std::size_t u,
                                                       CounterRng& rng) {
  DrawVector d = sample_draws(n, u, rng);
  SplitPlan plan = apply_draws(d);
  return {std::move(d), std::move(plan)};
}

/// d^(i): d with coordinate i (1-based) replaced.
inline DrawVector perturb_coordinate(const DrawVector& d, std::size_t i, std::size_t replacement) {
  if (i < 1 || i > d.u()) {
    throw InvalidArgument("coordinate " + std::to_string(i) + " outside [1, " +
                          std::to_string(d.u()) + "]");
  }
  if (replacement < i || replacement > d.n()) {
    throw InvalidArgument("replacement " + std::to_string(replacement) + " outside [" +
                          std::to_string(i) + ", " + std::to_string(d.n()) + "]");
  }
  std::vector<std::size_t> e(d.entries().begin(), d.entries().end());
  e[i - 1] = replacement;
  return DrawVector(d.n(), std::move(e));
}

inline void check_enumeration(std::size_t n, std::size_t u, std::uint64_t cap) {
  if (u == 0 || u > n) {
    throw InvalidArgument("split enumeration requires 1 <= u <= n (u=" + std::to_string(u) +
                          ", n=" + std::to_string(n) + ")");
  }
  const std::uint64_t count = binomial(n, u);
  if (count > cap) {
    throw ResourceLimit("C(" + std::to_string(n) + "," + std::to_string(u) + ") = " +
                        std::to_string(count) + " exceeds the enumeration cap " +
                        std::to_string(cap));
  }
}

/// Visits every u-subset of [1, n] once, in lexicographic order, with the
/// test sequence sorted.
template <typename Visitor>
void for_each_split(std::size_t n, std::size_t u, Visitor&& visit,
                    std::uint64_t cap = kDefaultEnumerationCap) {
  check_enumeration(n, u, cap);
  std::vector<std::size_t> comb(u);
  std::iota(comb.begin(), comb.end(), std::size_t{1});
  while (true) {
    visit(SplitPlan(n, comb));
    std::size_t k = u;
    while (k > 0 && comb[k - 1] == n - u + k) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t j = k; j < u; ++j) comb[j] = comb[j - 1] + 1;
  }
}

inline std::vector<SplitPlan> enumerate_splits(std::size_t n, std::size_t u,
                                               std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<SplitPlan> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(binomial(n, u), cap)));
  for_each_split(n, u, [&](SplitPlan p) { out.push_back(std::move(p)); }, cap);
  return out;
}

/// `;`-joined ascending test indices.
inline std::string join_test_indices(const SplitPlan& plan) {
  std::string s;
  for (std::size_t k = 0; k < plan.test_set().size(); ++k) {
    if (k) s += ';';
    s += std::to_string(plan.test_set()[k]);
  }
  return s;
}

/// CSV with header `trial,test_indices`.
inline void write_splits_csv(std::ostream& os, std::span<const SplitPlan> plans,
                             std::size_t first_trial = 0) {
  os << "trial,test_indices\n";
  for (std::size_t t = 0; t < plans.size(); ++t) {
    os << (first_trial + t) << ',' << join_test_indices(plans[t]) << '\n';
  }
}

}  // namespace tlc
