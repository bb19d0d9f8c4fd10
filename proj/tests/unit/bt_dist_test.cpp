#include "bteb/bt_dist.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"
#include "oracles.hpp"

namespace bteb {
namespace {

TEST(BTParams, Validation) {
  EXPECT_NO_THROW(BTParams(1, 0.5));
  EXPECT_THROW(BTParams(0, 0.5), DomainError);
  EXPECT_THROW(BTParams(3, 0.0), DomainError);
  EXPECT_THROW(BTParams(3, 1.0), DomainError);
}

TEST(LogCoeff, Examples) {
  EXPECT_EQ(log_coeff(5, 5), 0.0);
  EXPECT_NEAR(log_coeff(1, 3), std::log(1.5), 1e-15);
  EXPECT_NEAR(log_coeff(3, 4), std::log(3.0), 1e-15);
  EXPECT_THROW(log_coeff(3, 2), DomainError);
}

TEST(LogCoeff, MatchesRationalOracle) {
  for (int r : {1, 2, 3, 7}) {
    for (int x = r; x <= r + 40; ++x) {
      const double expect = std::log(static_cast<double>(oracle::bt_coeff(r, x)));
      EXPECT_NEAR(log_coeff(r, x), expect, 1e-12 * std::max(1.0, std::abs(expect))) << r << "," << x;
    }
  }
}

TEST(LogPmf, Examples) {
  EXPECT_NEAR(log_pmf(BTParams(3, 0.6), 3), -1.8, 1e-15);
  EXPECT_NEAR(log_pmf(BTParams(1, 0.5), 2), std::log(0.5 * std::exp(-1.0)), 1e-15);
  EXPECT_THROW(log_pmf(BTParams(3, 0.6), 2), DomainError);
}

TEST(LogPmf, FirstAtomIsExpMinusRTheta) {
  for (int r : {1, 3, 10, 50}) {
    for (double theta : {0.01, 0.3, 0.6, 0.95}) {
      EXPECT_NEAR(std::exp(log_pmf(BTParams(r, theta), r)), std::exp(-r * theta), 1e-14);
    }
  }
}

TEST(LogPmf, AgreesWithDirectEvaluation) {
  for (double theta : {0.2, 0.65}) {
    for (int x = 3; x < 40; ++x) {
      const double expect = static_cast<double>(oracle::bt_pmf(3, theta, x));
      EXPECT_NEAR(std::exp(log_pmf(BTParams(3, theta), x)) / expect, 1.0, 1e-12);
    }
  }
}

TEST(Cdf, Examples) {
  const BTParams p(3, 0.6);
  EXPECT_EQ(cdf(p, 2), 0.0);
  EXPECT_NEAR(cdf(p, 3), std::exp(-1.8), 1e-16);
  const SupportCap cap = support_cap(3, 0.6, 1e-12);
  EXPECT_GE(cdf(p, cap.cap), 1.0 - 1e-12);
}

TEST(SupportCap, Examples) {
  const SupportCap small = support_cap(1, 0.1, 0.5);
  EXPECT_EQ(small.cap, 1);
  const SupportCap cap = support_cap(3, 0.8, 1e-12);
  EXPECT_LE(1.0 - cdf(BTParams(3, 0.8), cap.cap), 1e-12);
  EXPECT_GT(1.0 - cdf(BTParams(3, 0.8), cap.cap - 1), 1e-12);
  EXPECT_THROW(support_cap(3, 0.8, 1.0), DomainError);
  EXPECT_THROW(support_cap(3, 0.8, 0.0), DomainError);
}

TEST(SupportCap, BoundsEverySmallerTheta) {
  const SupportCap cap = support_cap(3, 0.8, 1e-12);
  for (double theta : {0.1, 0.5, 0.65, 0.79, 0.8}) {
    EXPECT_LE(1.0 - cdf(BTParams(3, theta), cap.cap), 1e-12) << theta;
  }
}

TEST(Properties, NormalizationWithinTailBound) {
  for (int r : {1, 3, 8}) {
    for (double theta : {0.1, 0.5, 0.8, 0.9}) {
      const SupportCap cap = support_cap(r, theta, 1e-12);
      CompensatedSum s;
      for (std::int64_t x = r; x <= cap.cap; ++x) s.add(std::exp(log_pmf(BTParams(r, theta), x)));
      EXPECT_GE(s.value(), 1.0 - cap.tail_bound);
      EXPECT_LE(s.value(), 1.0 + 1e-12);
    }
  }
}

TEST(Properties, MonotoneLikelihoodRatio) {
  const std::vector<double> grid{0.05, 0.2, 0.5, 0.51, 0.7, 0.8, 0.95};
  for (int r : {1, 3}) {
    const std::int64_t top = support_cap(r, 0.95, 1e-12).cap;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const BTParams lo(r, grid[i]);
        const BTParams hi(r, grid[j]);
        double prev = log_pmf(hi, r) - log_pmf(lo, r);
        for (std::int64_t x = r + 1; x <= top; ++x) {
          const double ratio = log_pmf(hi, x) - log_pmf(lo, x);
          ASSERT_GT(ratio, prev) << "r=" << r << " x=" << x;
          prev = ratio;
        }
      }
    }
  }
}

TEST(Properties, StochasticOrdering) {
  const std::vector<double> grid{0.1, 0.4, 0.6, 0.8};
  const std::int64_t top = support_cap(3, 0.8, 1e-12).cap;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const CdfTable lo(BTParams(3, grid[i]), top);
    const CdfTable hi(BTParams(3, grid[i + 1]), top);
    for (std::int64_t x = 3; x <= top; ++x) ASSERT_GE(lo.cdf(x), hi.cdf(x)) << x;
  }
}

TEST(CdfTable, MatchesDirectCdf) {
  const BTParams p(2, 0.45);
  const CdfTable t(p, 60);
  for (std::int64_t x : {1, 2, 3, 10, 60, 80}) EXPECT_NEAR(t.cdf(x), cdf(p, std::min<std::int64_t>(x, 60)), 1e-15);
  EXPECT_EQ(t.pmf(1), 0.0);
}

TEST(SampleInverse, FirstAtomWhenUniformSmall) {
  // A theta this small puts almost all mass on x = r.
  Rng rng(7);
  const BTParams p(4, 1e-9);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_inverse(p, rng, 100), 4);
}

TEST(SampleInverse, MeanMatchesTotalProgeny) {
  const BTParams p(3, 0.6);
  const std::int64_t cap = support_cap(3, 0.6, kSamplingTailEps).cap;
  Rng rng(2024);
  constexpr int kDraws = 100000;
  double sum = 0;
  for (int i = 0; i < kDraws; ++i) sum += static_cast<double>(sample_inverse(p, rng, cap));
  const double mean = sum / kDraws;
  const double se = std::sqrt(3 * 0.6 / std::pow(0.4, 3) / kDraws);
  EXPECT_NEAR(mean, 7.5, 3 * se);
}

TEST(SampleInverse, ChiSquareAgainstPmf) {
  const BTParams p(3, 0.6);
  const std::int64_t cap = support_cap(3, 0.6, kSamplingTailEps).cap;
  Rng rng(99);
  constexpr int kDraws = 100000;
  std::vector<double> counts(static_cast<std::size_t>(cap - 2), 0.0);
  for (int i = 0; i < kDraws; ++i) counts[static_cast<std::size_t>(sample_inverse(p, rng, cap) - 3)] += 1;
  std::vector<double> expected(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) expected[i] = kDraws * std::exp(log_pmf(p, 3 + static_cast<std::int64_t>(i)));
  const auto chi = oracle::chi_square(counts, expected);
  EXPECT_LT(chi.statistic, oracle::chi_square_critical_01(chi.dof));
}

TEST(SampleInverse, CountsTruncation) {
  const BTParams p(3, 0.9);
  Rng rng(5);
  TruncationCounter counter;
  for (int i = 0; i < 2000; ++i) EXPECT_LE(sample_inverse(p, rng, 5, &counter), 5);
  EXPECT_EQ(counter.draws, 2000u);
  // F(5; 0.9) is about 0.14, so most draws hit the cap.
  EXPECT_GT(counter.truncated, 1500u);
}

TEST(SampleBranching, NearZeroThetaReturnsR) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_branching(BTParams(5, 1e-12), rng), 5);
}

TEST(SampleBranching, VarianceMatchesTotalProgeny) {
  const BTParams p(3, 0.6);
  Rng rng(31337);
  constexpr int kDraws = 100000;
  std::vector<double> xs(kDraws);
  double sum = 0;
  for (auto& x : xs) {
    x = static_cast<double>(sample_branching(p, rng));
    sum += x;
  }
  const double mean = sum / kDraws;
  double m2 = 0;
  double m4 = 0;
  for (double x : xs) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / (kDraws - 1);
  // se of the sample variance from the fourth central moment.
  const double se = std::sqrt((m4 / kDraws - var * var) / kDraws);
  EXPECT_NEAR(var, 28.125, 3 * se);
  EXPECT_NEAR(mean, 7.5, 3 * std::sqrt(28.125 / kDraws));
}

TEST(SampleBranching, TwoSampleAgainstInverse) {
  const BTParams p(3, 0.6);
  const std::int64_t cap = support_cap(3, 0.6, kSamplingTailEps).cap;
  Rng a(11);
  Rng b(12);
  constexpr int kDraws = 100000;
  std::vector<double> ca(static_cast<std::size_t>(cap + 1), 0.0);
  std::vector<double> cb(ca.size(), 0.0);
  for (int i = 0; i < kDraws; ++i) {
    ca[static_cast<std::size_t>(sample_inverse(p, a, cap))] += 1;
    cb[static_cast<std::size_t>(std::min(sample_branching(p, b), cap))] += 1;
  }
  // Two-sample chi-square with pooling on the combined counts.
  double stat = 0;
  int cells = 0;
  double oa = 0;
  double ob = 0;
  for (std::size_t i = 3; i < ca.size(); ++i) {
    oa += ca[i];
    ob += cb[i];
    if (oa + ob >= 10 || i + 1 == ca.size()) {
      if (oa + ob > 0) {
        stat += (oa - ob) * (oa - ob) / (oa + ob);
        ++cells;
      }
      oa = ob = 0;
    }
  }
  EXPECT_LT(stat, oracle::chi_square_critical_01(cells - 1));
}

TEST(CdfTable, SamplerAgreesWithSequentialSearch) {
  const BTParams p(3, 0.7);
  const std::int64_t cap = support_cap(3, 0.7, kSamplingTailEps).cap;
  const CdfTable table(p, cap);
  Rng a(77);
  Rng b(77);
  int mismatches = 0;
  for (int i = 0; i < 20000; ++i) mismatches += table.sample(a) != sample_inverse(p, b, cap);
  // The two accumulate identical compensated sums, so only exact ties could differ.
  EXPECT_EQ(mismatches, 0);
}

}  // namespace
}  // namespace bteb
