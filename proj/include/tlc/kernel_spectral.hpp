#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tlc/csv.hpp"
#include "tlc/error.hpp"
#include "tlc/summation.hpp"

namespace tlc {

enum class KernelFamily { linear, gaussian, dot_product_power };

/// linear: ⟨x, y⟩. gaussian: exp(−‖x − y‖² / (2·width²)).
/// dot_product_power: (1 + ⟨x, y⟩)^exponent with a positive integer exponent.
struct KernelSpec {
  KernelFamily family = KernelFamily::linear;
  double parameter = 1.0;
  std::optional<double> tau0_sq;  // declared sup of K(x, x), checked on the data

  double operator()(std::span<const double> x, std::span<const double> y) const {
    switch (family) {
      case KernelFamily::linear: {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
        return s;
      }
      case KernelFamily::gaussian: {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
        return std::exp(-s / (2.0 * parameter * parameter));
      }
      case KernelFamily::dot_product_power: {
        double s = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
        return std::pow(s, parameter);
      }
    }
    return 0.0;
  }
};

/// Parses `linear`, `gaussian:<width>` or `dot_product_power:<exponent>`.
inline KernelSpec parse_kernel_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  KernelSpec spec;
  double param = 1.0;
  const bool has_param = colon != std::string::npos;
  if (has_param && !parse_double(std::string_view(text).substr(colon + 1), param)) {
    throw InvalidArgument("kernel parameter in '" + text + "' is not numeric");
  }
  if (family == "linear") {
    spec.family = KernelFamily::linear;
  } else if (family == "gaussian") {
    if (!has_param || !(param > 0.0)) throw InvalidArgument("gaussian kernel needs a width > 0");
    spec.family = KernelFamily::gaussian;
  } else if (family == "dot_product_power") {
    if (!has_param || !(param >= 1.0) || param != std::floor(param)) {
      throw InvalidArgument("dot_product_power kernel needs a positive integer exponent");
    }
    spec.family = KernelFamily::dot_product_power;
  } else {
    throw InvalidArgument("unknown kernel family '" + family + "'");
  }
  spec.parameter = param;
  return spec;
}

/// Descending eigenvalues of K_n = K / n with suffix sums
/// tail_sums[Q] = Σ_{q > Q} λ̂_q for Q = 0..n.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.empty()) throw InvalidArgument("spectrum needs at least one eigenvalue");
    for (double v : eigenvalues_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("spectrum eigenvalues must be finite and >= 0");
    }
    std::sort(eigenvalues_.begin(), eigenvalues_.end(), std::greater<>());
    tail_sums_.assign(eigenvalues_.size() + 1, 0.0);
    CompensatedSum acc;
    for (std::size_t q = eigenvalues_.size(); q-- > 0;) {
      acc.add(eigenvalues_[q]);
      tail_sums_[q] = acc.value();
    }
  }

  std::size_t size() const noexcept { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  std::span<const double> tail_sums() const noexcept { return tail_sums_; }
  double tail(std::size_t Q) const { return tail_sums_.at(Q); }
  double trace() const noexcept { return tail_sums_.front(); }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> tail_sums_;
};

inline constexpr double kEigenClampRelative = 1e-8;

/// K_ij = kernel(x_i, x_j) over the rows of `data`.
inline Eigen::MatrixXd gram_matrix(const std::vector<std::vector<double>>& data,
                                   const KernelSpec& kernel) {
  if (data.empty()) throw InvalidArgument("gram matrix needs n >= 1 points");
  const auto n = static_cast<Eigen::Index>(data.size());
  for (const auto& x : data) {
    if (x.size() != data.front().size()) throw InvalidArgument("data rows differ in dimension");
  }
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = kernel(data[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(j)]);
    }
  }
  if (kernel.tau0_sq) {
    const double diag = K.diagonal().maxCoeff();
    if (diag > *kernel.tau0_sq * (1.0 + 1e-12)) {
      throw InvalidKernel("K(x, x) = " + format_double(diag) + " exceeds tau0^2 = " +
                          format_double(*kernel.tau0_sq));
    }
  }
  return K;
}

/// Eigenvalues of a symmetric PSD matrix scaled by 1/n. Negatives down to
/// −1e−8·λ̂_1 are clamped to 0; anything lower is rejected.
inline Spectrum spectrum_of(const Eigen::MatrixXd& K) {
  const double n = static_cast<double>(K.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K / n, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  std::vector<double> ev(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  const double top = std::max(0.0, *std::max_element(ev.begin(), ev.end()));
  for (double& v : ev) {
    if (v < -kEigenClampRelative * top || (top == 0.0 && v < 0.0 && v < -1e-300)) {
      throw InvalidKernel("gram matrix has eigenvalue " + format_double(v) +
                          " below the clamping threshold");
    }
    v = std::max(v, 0.0);
  }
  return Spectrum(std::move(ev));
}

inline Spectrum gram_and_spectrum(const std::vector<std::vector<double>>& data,
                                  const KernelSpec& kernel) {
  return spectrum_of(gram_matrix(data, kernel));
}

/// λ̂_q = q^{−2α}, q = 1..n.
inline Spectrum synthetic_spectrum(std::size_t n, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("synthetic spectrum needs alpha > 0");
  if (n == 0) throw InvalidArgument("synthetic spectrum needs n >= 1");
  std::vector<double> ev(n);
  for (std::size_t q = 1; q <= n; ++q) ev[q - 1] = std::pow(static_cast<double>(q), -2.0 * alpha);
  return Spectrum(std::move(ev));
}

/// r(u, m, Q) = Q(1/u + 1/m) + √(tail_Q / u) + √(tail_Q / m).
inline double r_umQ(const Spectrum& s, std::size_t u, std::size_t m, std::size_t Q) {
  if (Q > s.size()) throw InvalidArgument("Q must lie in [0, n]");
  if (u == 0 || m == 0) throw InvalidArgument("r(u,m,Q) needs u, m >= 1");
  const double ud = static_cast<double>(u);
  const double md = static_cast<double>(m);
  const double t = s.tail(Q);
  return static_cast<double>(Q) * (1.0 / ud + 1.0 / md) + std::sqrt(t / ud) + std::sqrt(t / md);
}

struct SpectralMinimum {
  double value = 0.0;
  std::size_t Q = 0;
};

/// min over 0 <= Q <= n of r(u, m, Q); ties go to the smallest Q.
inline SpectralMinimum min_r_umQ(const Spectrum& s, std::size_t u, std::size_t m) {
  SpectralMinimum best{r_umQ(s, u, m, 0), 0};
  for (std::size_t Q = 1; Q <= s.size(); ++Q) {
    const double v = r_umQ(s, u, m, Q);
    if (v < best.value) best = {v, Q};
  }
  return best;
}

/// φ̃(r) = min_Q (√(rQ / size) + μ·√(tail_Q / size)).
inline SpectralMinimum local_kernel_complexity_at(const Spectrum& s, double r,
                                                  std::size_t side_size, double mu) {
  if (!(r >= 0.0) || !(mu >= 0.0) || side_size == 0) {
    throw InvalidArgument("local kernel complexity needs r >= 0, mu >= 0, size >= 1");
  }
  const double sz = static_cast<double>(side_size);
  SpectralMinimum best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t Q = 0; Q <= s.size(); ++Q) {
    const double v = std::sqrt(r * static_cast<double>(Q) / sz) + mu * std::sqrt(s.tail(Q) / sz);
    if (v < best.value) best = {v, Q};
  }
  return best;
}

inline double local_kernel_complexity(const Spectrum& s, double r, std::size_t side_size,
                                      double mu) {
  return local_kernel_complexity_at(s, r, side_size, mu).value;
}

/// θ · min over 0 <= Q <= min(s, n) of (Q/s + √(tail_Q / s)).
inline SpectralMinimum prior_fixed_point_formula_at(const Spectrum& spec, std::size_t s,
                                                    double theta = 1.0) {
  if (s == 0) throw InvalidArgument("prior fixed-point formula needs s >= 1");
  if (!(theta > 0.0)) throw InvalidArgument("theta must be positive");
  const double sd = static_cast<double>(s);
  SpectralMinimum best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t Q = 0; Q <= std::min(s, spec.size()); ++Q) {
    const double v = static_cast<double>(Q) / sd + std::sqrt(spec.tail(Q) / sd);
    if (v < best.value) best = {v, Q};
  }
  best.value *= theta;
  return best;
}

inline double prior_fixed_point_formula(const Spectrum& spec, std::size_t s, double theta = 1.0) {
  return prior_fixed_point_formula_at(spec, s, theta).value;
}

/// CSV `q,lambda_hat,tail_sum` for q = 1..n, where tail_sum is Σ_{q' > q} λ̂_{q'}
/// (that is, tail_Q at Q = q).
inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "q,lambda_hat,tail_sum\n";
  for (std::size_t q = 1; q <= s.size(); ++q) {
    os << q << ',' << format_double(s.eigenvalues()[q - 1]) << ',' << format_double(s.tail(q)) << '\n';
  }
}

/// Reads the `q,lambda_hat,tail_sum` format back; only lambda_hat is used.
inline Spectrum read_spectrum_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> ev;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_fields(body, ',');
    if (fields.size() < 2) throw ParseError(source, lineno, "expected q,lambda_hat[,tail_sum]");
    double v = 0.0;
    if (!parse_double(fields[1], v)) {
      if (ev.empty() && trim(fields[1]) == "lambda_hat") continue;
      throw ParseError(source, lineno, "lambda_hat is not numeric");
    }
    if (v < 0.0) throw ParseError(source, lineno, "negative eigenvalue");
    ev.push_back(v);
  }
  if (ev.empty()) throw ParseError(source, lineno, "no eigenvalues");
  return Spectrum(std::move(ev));
}

}  // namespace tlc
