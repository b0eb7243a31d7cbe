#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tlc/complexity.hpp"

using tlc::FunctionTable;
using tlc::TcKind;

namespace {

const std::vector<std::vector<double>> kTwoRows{{0, 1, 0, 1}, {1, 0, 1, 0}};

tlc::Sampling exact() {
  tlc::Sampling s;
  s.mode = tlc::EstimationMode::exact;
  return s;
}

tlc::Sampling mc(std::size_t trials, std::uint64_t seed) {
  tlc::Sampling s;
  s.mode = tlc::EstimationMode::monte_carlo;
  s.trials = trials;
  s.seed = seed;
  s.workers = 2;
  return s;
}

}  // namespace

TEST(TransductiveComplexity, ConstantClassIsZero) {
  const auto cls = FunctionTable::from_rows({{3, 3, 3, 3, 3}});
  for (auto k : {TcKind::u_plus, TcKind::u_minus, TcKind::m_plus, TcKind::m_minus}) {
    const auto e = tlc::transductive_complexity(k, cls, 2, exact());
    EXPECT_NEAR(e.mean, 0.0, 1e-15);
    EXPECT_TRUE(e.exact);
    EXPECT_EQ(e.trials, 10u);
    EXPECT_EQ(e.std_error, 0.0);
  }
}

TEST(TransductiveComplexity, TwoFunctionFixture) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  EXPECT_NEAR(tlc::transductive_complexity(TcKind::u_plus, cls, 2, exact()).mean, 1.0 / 6, 1e-15);
  EXPECT_NEAR(tlc::transductive_complexity(TcKind::m_plus, cls, 2, exact()).mean, 1.0 / 6, 1e-15);
  EXPECT_NEAR(oracle::tc(kTwoRows, 2, true, true), 1.0 / 6, 1e-15);
}

TEST(TransductiveComplexity, MatchesOracleOnRandomClasses) {
  tlc::CounterRng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(6));
    for (auto& r : rows)
      for (double& v : r) v = rng.uniform01() * 2 - 1;
    const auto cls = FunctionTable::from_rows(rows);
    for (std::size_t u = 1; u < 6; ++u) {
      EXPECT_NEAR(tlc::transductive_complexity(TcKind::u_plus, cls, u, exact()).mean, oracle::tc(rows, u, true, true), 1e-12);
      EXPECT_NEAR(tlc::transductive_complexity(TcKind::u_minus, cls, u, exact()).mean, oracle::tc(rows, u, true, false), 1e-12);
      EXPECT_NEAR(tlc::transductive_complexity(TcKind::m_plus, cls, u, exact()).mean, oracle::tc(rows, u, false, true), 1e-12);
      EXPECT_NEAR(tlc::transductive_complexity(TcKind::m_minus, cls, u, exact()).mean, oracle::tc(rows, u, false, false), 1e-12);
    }
  }
}

TEST(TransductiveComplexity, MonteCarloAgreesWithExact) {
  tlc::CounterRng rng(20);
  std::vector<std::vector<double>> rows(4, std::vector<double>(9));
  for (auto& r : rows)
    for (double& v : r) v = rng.uniform01();
  const auto cls = FunctionTable::from_rows(rows);
  for (auto k : {TcKind::u_plus, TcKind::u_minus, TcKind::m_plus, TcKind::m_minus}) {
    const auto ex = tlc::transductive_complexity(k, cls, 3, exact());
    const auto e = tlc::transductive_complexity(k, cls, 3, mc(50'000, 77));
    EXPECT_FALSE(e.exact);
    EXPECT_LE(std::abs(e.mean - ex.mean), 4 * e.std_error) << tlc::to_string(k);
  }
}

TEST(TransductiveComplexity, RejectsBadSizesAndCap) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  EXPECT_THROW(tlc::transductive_complexity(TcKind::u_plus, cls, 0, exact()), tlc::InvalidArgument);
  EXPECT_THROW(tlc::transductive_complexity(TcKind::u_plus, cls, 4, exact()), tlc::InvalidArgument);
  auto s = exact();
  s.exact_cap = 5;
  EXPECT_THROW(tlc::transductive_complexity(TcKind::u_plus, cls, 2, s), tlc::ResourceLimit);
  s.mode = tlc::EstimationMode::automatic;
  EXPECT_FALSE(tlc::transductive_complexity(TcKind::u_plus, cls, 2, s).exact);
}

TEST(TransductiveComplexity, DeterministicAcrossWorkers) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  auto a = mc(5000, 3);
  auto b = a;
  b.workers = 1;
  EXPECT_EQ(tlc::transductive_complexity(TcKind::u_plus, cls, 2, a).mean,
            tlc::transductive_complexity(TcKind::u_plus, cls, 2, b).mean);
}

TEST(InductiveRademacher, Examples) {
  const auto single = FunctionTable::from_rows({{1}});
  EXPECT_NEAR(tlc::inductive_rademacher(single, 1, exact()).mean, 0.0, 1e-15);
  const auto pm = FunctionTable::from_rows({{1, 1, 1, 1}, {-1, -1, -1, -1}});
  EXPECT_NEAR(tlc::inductive_rademacher(pm, 1, exact()).mean, 1.0, 1e-15);
  const auto zero = FunctionTable::from_rows({{0, 0, 0}});
  EXPECT_NEAR(tlc::inductive_rademacher(zero, 2, exact()).mean, 0.0, 1e-15);
  EXPECT_THROW(tlc::inductive_rademacher(zero, 0, exact()), tlc::InvalidArgument);
}

TEST(InductiveRademacher, ExactMatchesOracleAndMonteCarlo) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto ex = tlc::inductive_rademacher(cls, k, exact());
    EXPECT_NEAR(ex.mean, oracle::inductive(kTwoRows, k), 1e-14);
    EXPECT_EQ(ex.trials, static_cast<std::uint64_t>(std::pow(8.0, static_cast<double>(k))));
    const auto e = tlc::inductive_rademacher(cls, k, mc(50'000, 8));
    EXPECT_LE(std::abs(e.mean - ex.mean), 4 * e.std_error);
  }
}

TEST(Symmetrization, TransductiveAtMostTwiceInductiveOnSmallInstances) {
  tlc::CounterRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t n = 2; n <= 4; ++n) {
      std::vector<std::vector<double>> rows(3, std::vector<double>(n));
      for (auto& r : rows)
        for (double& v : r) v = std::round(4 * rng.uniform01() - 2);
      const auto cls = FunctionTable::from_rows(rows);
      for (std::size_t u = 1; u <= 2 && u < n; ++u) {
        const double ind = tlc::inductive_rademacher(cls, u, exact()).mean;
        const double up = tlc::transductive_complexity(TcKind::u_plus, cls, u, exact()).mean;
        const double um = tlc::transductive_complexity(TcKind::u_minus, cls, u, exact()).mean;
        EXPECT_LE(std::max(up, um), 2 * ind + 1e-12);
      }
    }
  }
}

TEST(LocalizedCurve, Examples) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  const std::vector<double> tilde{0.1, 0.9};
  const std::vector<double> radii{0.05, 0.5, 1.0};
  const auto curve = tlc::localized_curve(cls, tilde, tlc::CurveSide::u, 2, radii, exact());
  EXPECT_EQ(curve.values[0], 0.0);
  // r = 0.5 keeps h1 only: its R⁺ and R⁺ of h1² average to 0 over all splits.
  const auto h1 = FunctionTable::from_rows({kTwoRows[0]});
  const auto h1_sq = tlc::squared_class(h1);
  const double single = std::max(tlc::transductive_complexity(TcKind::u_plus, h1, 2, exact()).mean,
                                 tlc::transductive_complexity(TcKind::u_plus, h1_sq, 2, exact()).mean);
  EXPECT_NEAR(curve.values[1], std::max(0.0, single), 1e-15);
  const double full = std::max(tlc::transductive_complexity(TcKind::u_plus, cls, 2, exact()).mean,
                               tlc::transductive_complexity(TcKind::u_plus, tlc::squared_class(cls), 2, exact()).mean);
  EXPECT_NEAR(curve.values[2], full, 1e-15);
  EXPECT_NEAR(curve.values[2], 1.0 / 6, 1e-15);
}

TEST(LocalizedCurve, MSideUsesMinusForRowsAndPlusForSquares) {
  tlc::CounterRng rng(22);
  std::vector<std::vector<double>> rows(3, std::vector<double>(6));
  for (auto& r : rows)
    for (double& v : r) v = 2 * rng.uniform01() - 1;
  const auto cls = FunctionTable::from_rows(rows);
  std::vector<std::vector<double>> sq = rows;
  for (auto& r : sq)
    for (double& v : r) v *= v;
  const std::vector<double> tilde{0, 0, 0};
  const std::vector<double> radii{1.0};
  const auto curve = tlc::localized_curve(cls, tilde, tlc::CurveSide::m, 2, radii, exact());
  EXPECT_NEAR(curve.values[0], std::max(oracle::tc(rows, 2, false, false), oracle::tc(sq, 2, false, true)), 1e-12);
  const auto bare = tlc::localized_curve(cls, tilde, tlc::CurveSide::m, 2, radii, exact(), false);
  EXPECT_NEAR(bare.values[0], std::max(0.0, oracle::tc(rows, 2, false, false)), 1e-12);
}

TEST(LocalizedCurve, NondecreasingInRadiusUnderMonteCarlo) {
  tlc::CounterRng rng(24);
  std::vector<std::vector<double>> rows(6, std::vector<double>(12));
  std::vector<double> tilde(6);
  for (auto& r : rows)
    for (double& v : r) v = 2 * rng.uniform01() - 1;
  for (double& t : tilde) t = rng.uniform01();
  const auto cls = FunctionTable::from_rows(rows);
  const auto radii = tlc::breakpoint_radii(tilde);
  const auto curve = tlc::localized_curve(cls, tilde, tlc::CurveSide::u, 5, radii, mc(2000, 4));
  for (std::size_t k = 1; k < curve.values.size(); ++k) EXPECT_GE(curve.values[k], curve.values[k - 1]);
}

TEST(LocalizedCurve, RejectsBadRadii) {
  const auto cls = FunctionTable::from_rows(kTwoRows);
  const std::vector<double> tilde{0.1, 0.9};
  const std::vector<double> bad{0.5, 0.5};
  EXPECT_THROW(tlc::localized_curve(cls, tilde, tlc::CurveSide::u, 2, bad, exact()), tlc::InvalidArgument);
  const std::vector<double> zero{0.0};
  EXPECT_THROW(tlc::localized_curve(cls, tilde, tlc::CurveSide::u, 2, zero, exact()), tlc::InvalidArgument);
  const std::vector<double> short_w{0.1};
  const std::vector<double> ok{1.0};
  EXPECT_THROW(tlc::localized_curve(cls, short_w, tlc::CurveSide::u, 2, ok, exact()), tlc::InvalidArgument);
}

TEST(SubrootEnvelope, Examples) {
  tlc::LocalizedCurve one{{1.0}, {2.0}, {0.0}, true};
  const auto psi = tlc::subroot_envelope(one);
  EXPECT_DOUBLE_EQ(psi(4.0), 2.0);
  EXPECT_DOUBLE_EQ(psi(0.25), 1.0);
  tlc::LocalizedCurve zeros{{1.0, 2.0}, {0.0, 0.0}, {0, 0}, true};
  EXPECT_EQ(tlc::subroot_envelope(zeros)(3.0), 0.0);
  tlc::LocalizedCurve two{{1.0, 4.0}, {1.0, 3.0}, {0, 0}, true};
  EXPECT_DOUBLE_EQ(tlc::subroot_envelope(two)(1.0), 1.5);
  tlc::LocalizedCurve neg{{1.0}, {-1.0}, {0}, true};
  EXPECT_THROW(tlc::subroot_envelope(neg), tlc::InvalidArgument);
}

TEST(SubrootEnvelope, SatisfiesPredicateAndMajorizesPoints) {
  tlc::CounterRng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    tlc::LocalizedCurve c;
    double r = 0.01;
    for (int k = 0; k < 6; ++k) {
      r *= 1.0 + 3 * rng.uniform01();
      c.radii.push_back(r);
      c.values.push_back(rng.uniform01());
      c.std_errors.push_back(0);
    }
    const auto psi = tlc::subroot_envelope(c);
    for (std::size_t k = 0; k < c.radii.size(); ++k) EXPECT_GE(psi(c.radii[k]), c.values[k]);
    EXPECT_EQ(tlc::subroot_violation(psi, tlc::geometric_grid(1e-6, 1e3)), "");
  }
}

TEST(CurveCsv, RoundTrip) {
  tlc::LocalizedCurve c{{0.5, 2.0}, {0.25, 1.0 / 3}, {0.0, 0.01}, false};
  std::ostringstream os;
  tlc::write_curve_csv(os, c);
  EXPECT_EQ(os.str().substr(0, 17), "r,psi_hat,stderr\n");
  std::istringstream in(os.str());
  const auto back = tlc::read_curve_csv(in, "mem");
  EXPECT_EQ(back.radii, c.radii);
  EXPECT_EQ(back.values, c.values);
  EXPECT_EQ(back.std_errors, c.std_errors);
  std::istringstream bad("r,psi_hat\n2,1\n1,1\n");
  EXPECT_THROW(tlc::read_curve_csv(bad, "mem"), tlc::ParseError);
}
