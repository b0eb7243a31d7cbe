#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tlc/empirical_process.hpp"
#include "tlc/parallel.hpp"
#include "tlc/rng.hpp"
#include "tlc/split.hpp"

using tlc::CounterRng;
using tlc::DrawVector;
using tlc::SplitPlan;

namespace {
std::vector<std::size_t> vec(std::span<const std::size_t> s) { return {s.begin(), s.end()}; }
}  // namespace

TEST(CounterRng, SameSeedAndStreamGiveSameStream) {
  CounterRng a(42, 3), b(42, 3);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a(), b());
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
  CounterRng a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int k = 0; k < 100; ++k) {
    const auto x = a(), y = b(), z = c();
    same_ab += x == y;
    same_ac += x == z;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(CounterRng, UniformIntStaysInRangeAndHitsEnds) {
  CounterRng rng(1);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 2000; ++k) {
    const auto v = rng.uniform_int(3, 7);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(rng.uniform_int(5, 5), 5u);
}

TEST(CounterRng, Uniform01InUnitInterval) {
  CounterRng rng(9);
  double sum = 0;
  for (int k = 0; k < 10000; ++k) {
    const double v = rng.uniform01();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(ParallelMap, ResultIndependentOfWorkerCount) {
  auto fn = [](std::size_t t) {
    CounterRng rng(5, t);
    return rng.uniform01();
  };
  const auto one = tlc::parallel_map<double>(1000, 1, fn);
  const auto four = tlc::parallel_map<double>(1000, 4, fn);
  EXPECT_EQ(one, four);
}

TEST(ParallelMap, RethrowsWorkerFailure) {
  EXPECT_THROW(tlc::parallel_map<int>(10, 3, [](std::size_t t) -> int {
                 if (t == 7) throw tlc::NumericError("boom");
                 return 0;
               }),
               tlc::NumericError);
}

TEST(Randperm, IdentityDrawsCauseNoSwaps) {
  const auto plan = tlc::apply_draws(DrawVector(3, {1, 2, 3}));
  EXPECT_EQ(vec(plan.test_sequence()), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(plan.train_set().empty());
}

TEST(Randperm, HandTracedDraws) {
  const auto plan = tlc::apply_draws(DrawVector(3, {3, 2}));
  EXPECT_EQ(vec(plan.test_sequence()), (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(vec(plan.train_set()), (std::vector<std::size_t>{1}));
}

TEST(Randperm, MatchesLiteralTraceForEveryDrawVector) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (std::size_t u = 1; u <= n; ++u) {
      for (const auto& d : oracle::all_draws(n, u)) {
        EXPECT_EQ(vec(tlc::apply_draws(DrawVector(n, d)).test_sequence()), oracle::randperm(n, d));
      }
    }
  }
}

TEST(Randperm, RejectsBadSizes) {
  CounterRng rng(0);
  EXPECT_THROW(tlc::randperm_prefix(4, 0, rng), tlc::InvalidArgument);
  EXPECT_THROW(tlc::randperm_prefix(4, 5, rng), tlc::InvalidArgument);
  EXPECT_THROW(DrawVector(3, {0, 2}), tlc::InvalidArgument);
  EXPECT_THROW(DrawVector(3, {1, 4}), tlc::InvalidArgument);
}

TEST(Randperm, SetFormUniformByChiSquare) {
  // n=5, u=2 set form has 10 cells; n=6, u=3 has 20.
  for (auto [n, u] : {std::pair<std::size_t, std::size_t>{5, 2}, {6, 3}}) {
    const std::size_t trials = 100'000;
    std::map<std::string, std::size_t> counts;
    for (std::size_t t = 0; t < trials; ++t) {
      CounterRng rng(11, t);
      counts[tlc::join_test_indices(tlc::randperm_prefix(n, u, rng).second)]++;
    }
    const double cells = static_cast<double>(tlc::binomial(n, u));
    ASSERT_EQ(counts.size(), tlc::binomial(n, u));
    const double expected = static_cast<double>(trials) / cells;
    double stat = 0;
    for (const auto& [k, c] : counts) stat += (c - expected) * (c - expected) / expected;
    EXPECT_GT(oracle::chi_square_p(stat, cells - 1), 0.001) << "n=" << n << " u=" << u;
  }
}

TEST(Randperm, MonteCarloMeanAgreesWithEnumeration) {
  const std::vector<double> w{0.3, 2.0, -1.0, 0.7, 5.0, 0.0};
  auto stat = [&](const SplitPlan& p) { return tlc::test_sum(w, p) * tlc::test_sum(w, p); };
  double exact = 0;
  const auto plans = tlc::enumerate_splits(6, 3);
  for (const auto& p : plans) exact += stat(p);
  exact /= static_cast<double>(plans.size());
  std::vector<double> xs;
  for (std::size_t t = 0; t < 100'000; ++t) {
    CounterRng rng(3, t);
    xs.push_back(stat(tlc::randperm_prefix(6, 3, rng).second));
  }
  const auto e = tlc::summarize(xs);
  EXPECT_LE(std::abs(e.mean - exact), 4 * e.std_error);
}

TEST(EnumerateSplits, FourChooseTwo) {
  const auto plans = tlc::enumerate_splits(4, 2);
  ASSERT_EQ(plans.size(), 6u);
  const std::vector<std::vector<std::size_t>> want{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(vec(plans[k].test_sequence()), want[k]);
}

TEST(EnumerateSplits, FullTestSetAndRejections) {
  const auto plans = tlc::enumerate_splits(4, 4);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_TRUE(plans[0].train_set().empty());
  EXPECT_THROW(tlc::enumerate_splits(4, 0), tlc::InvalidArgument);
  EXPECT_THROW(tlc::enumerate_splits(30, 15), tlc::ResourceLimit);
  EXPECT_THROW(tlc::enumerate_splits(6, 3, 19), tlc::ResourceLimit);
  EXPECT_EQ(tlc::enumerate_splits(6, 3, 20).size(), 20u);
}

TEST(EnumerateSplits, MatchesBitmaskOracle) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t u = 1; u <= n; ++u) {
      const auto plans = tlc::enumerate_splits(n, u);
      auto want = oracle::subsets(n, u);
      std::sort(want.begin(), want.end());
      ASSERT_EQ(plans.size(), want.size());
      for (std::size_t k = 0; k < want.size(); ++k) EXPECT_EQ(vec(plans[k].test_set()), want[k]);
    }
  }
}

TEST(Binomial, SmallValuesAndSaturation) {
  EXPECT_EQ(tlc::binomial(4, 2), 6u);
  EXPECT_EQ(tlc::binomial(5, 0), 1u);
  EXPECT_EQ(tlc::binomial(3, 4), 0u);
  EXPECT_EQ(tlc::binomial(200, 100), UINT64_MAX);
}

TEST(PerturbCoordinate, Examples) {
  const DrawVector d(3, {3, 2});
  EXPECT_EQ(vec(tlc::perturb_coordinate(d, 2, 3).entries()), (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(vec(d.entries()), (std::vector<std::size_t>{3, 2}));
  const DrawVector e(3, {1, 2, 3});
  EXPECT_EQ(tlc::perturb_coordinate(e, 1, 1), e);
  EXPECT_THROW(tlc::perturb_coordinate(d, 1, 0), tlc::InvalidArgument);
  EXPECT_THROW(tlc::perturb_coordinate(d, 2, 1), tlc::InvalidArgument);
  EXPECT_THROW(tlc::perturb_coordinate(d, 3, 3), tlc::InvalidArgument);
}

TEST(PerturbCoordinate, SetsDifferByAtMostOneElement) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t u = 1; u <= n; ++u) {
      for (const auto& raw : oracle::all_draws(n, u)) {
        const DrawVector d(n, raw);
        const auto z = tlc::apply_draws(d);
        for (std::size_t i = 1; i <= u; ++i) {
          for (std::size_t r = i; r <= n; ++r) {
            const auto zp = tlc::apply_draws(tlc::perturb_coordinate(d, i, r));
            std::size_t missing = 0;
            for (std::size_t v : z.test_set()) missing += !oracle::contains(vec(zp.test_set()), v);
            ASSERT_LE(missing, 1u);
          }
        }
      }
    }
  }
}

TEST(SplitCsv, HeaderAndSortedJoinedIndices) {
  std::vector<SplitPlan> plans{SplitPlan(5, {4, 1}), SplitPlan(5, {2, 5})};
  std::ostringstream os;
  tlc::write_splits_csv(os, plans);
  EXPECT_EQ(os.str(), "trial,test_indices\n0,1;4\n1,2;5\n");
}

TEST(SplitPlan, RejectsDuplicatesAndOutOfRange) {
  EXPECT_THROW(SplitPlan(4, {1, 1}), tlc::InvalidArgument);
  EXPECT_THROW(SplitPlan(4, {0}), tlc::InvalidArgument);
  EXPECT_THROW(SplitPlan(4, {5}), tlc::InvalidArgument);
}
