#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library beyond plain containers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

using Row = std::vector<double>;
using Index = std::vector<std::size_t>;

/// RANDPERM traced literally on 1-based arrays.
inline Index randperm(std::size_t n, const Index& draws) {
  Index I(n + 1);
  std::iota(I.begin(), I.end(), std::size_t{0});
  Index Z;
  for (std::size_t i = 1; i <= draws.size(); ++i) {
    const std::size_t di = draws[i - 1];
    Z.push_back(I[di]);
    std::swap(I[i], I[di]);
  }
  return Z;
}

/// Every draw vector with d_i in [i, n].
inline std::vector<Index> all_draws(std::size_t n, std::size_t u) {
  std::vector<Index> out;
  Index d(u);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i > u) {
      out.push_back(d);
      return;
    }
    for (std::size_t v = i; v <= n; ++v) {
      d[i - 1] = v;
      rec(i + 1);
    }
  };
  rec(1);
  return out;
}

/// u-subsets of [1, n] via bitmasks, sorted ascending inside each subset.
inline std::vector<Index> subsets(std::size_t n, std::size_t u) {
  std::vector<Index> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != u) continue;
    Index s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i + 1);
    }
    out.push_back(s);
  }
  return out;
}

inline bool contains(const Index& s, std::size_t i) { return std::find(s.begin(), s.end(), i) != s.end(); }

inline double mean_on(const Row& h, const Index& idx) {
  long double s = 0;
  for (std::size_t i : idx) s += h[i - 1];
  return static_cast<double>(s / static_cast<long double>(idx.size()));
}

inline Index complement(std::size_t n, const Index& test) {
  Index out;
  for (std::size_t i = 1; i <= n; ++i) {
    if (!contains(test, i)) out.push_back(i);
  }
  return out;
}

inline double full_mean(const Row& h) {
  long double s = 0;
  for (double v : h) s += v;
  return static_cast<double>(s / static_cast<long double>(h.size()));
}

/// sup_h (test mean − train mean).
inline double gap(const std::vector<Row>& cls, const Index& test) {
  const Index train = complement(cls.front().size(), test);
  double best = -INFINITY;
  for (const auto& h : cls) best = std::max(best, mean_on(h, test) - mean_on(h, train));
  return best;
}

/// Average of fn(test set) over all u-subsets.
inline double subset_average(std::size_t n, std::size_t u, const std::function<double(const Index&)>& fn) {
  const auto all = subsets(n, u);
  long double s = 0;
  for (const auto& t : all) s += fn(t);
  return static_cast<double>(s / static_cast<long double>(all.size()));
}

/// E sup_h (subset mean − full mean) over u-subsets (test side) or their complements.
inline double tc(const std::vector<Row>& cls, std::size_t u, bool test_side, bool plus) {
  const std::size_t n = cls.front().size();
  return subset_average(n, u, [&](const Index& t) {
    const Index s = test_side ? t : complement(n, t);
    double best = -INFINITY;
    for (const auto& h : cls) {
      const double dev = mean_on(h, s) - full_mean(h);
      best = std::max(best, plus ? dev : -dev);
    }
    return best;
  });
}

/// E sup_h (1/k) Σ σ_t h(Y_t) by nested enumeration.
inline double inductive(const std::vector<Row>& cls, std::size_t k) {
  const std::size_t n = cls.front().size();
  long double total = 0;
  std::size_t count = 0;
  Index ys(k, 0);
  std::vector<int> sg(k, -1);
  std::function<void(std::size_t)> rec = [&](std::size_t t) {
    if (t == k) {
      double best = -INFINITY;
      for (const auto& h : cls) {
        double s = 0;
        for (std::size_t j = 0; j < k; ++j) s += sg[j] * h[ys[j]];
        best = std::max(best, s / static_cast<double>(k));
      }
      total += best;
      ++count;
      return;
    }
    for (std::size_t y = 0; y < n; ++y) {
      for (int s : {-1, 1}) {
        ys[t] = y;
        sg[t] = s;
        rec(t + 1);
      }
    }
  };
  rec(0);
  return static_cast<double>(total / static_cast<long double>(count));
}

/// Upper tail probability of a chi-square statistic.
inline double chi_square_p(double stat, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

/// Per-split ERM excess risk by direct argmin scans (lowest index on ties).
inline std::vector<double> erm_excess(const std::vector<Row>& losses, std::size_t u) {
  const std::size_t n = losses.front().size();
  std::vector<double> out;
  for (const auto& test : subsets(n, u)) {
    const Index train = complement(n, test);
    std::size_t erm = 0, orc = 0;
    for (std::size_t f = 1; f < losses.size(); ++f) {
      if (mean_on(losses[f], train) < mean_on(losses[erm], train)) erm = f;
      if (mean_on(losses[f], test) < mean_on(losses[orc], test)) orc = f;
    }
    out.push_back(mean_on(losses[erm], test) - mean_on(losses[orc], test));
  }
  return out;
}

}  // namespace oracle
