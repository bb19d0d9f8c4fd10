#pragma once

#include <cstdint>
#include <vector>

#include "bteb/bt_dist.hpp"
#include "bteb/prior.hpp"

namespace bteb {

/// E[Theta | X = x] = I_1(x) / I_0(x).
double posterior_mean(const Prior& g, int r, std::int64_t x);

/// Closed form of the posterior mean under Uniform(0, 1), in log space.
/// Kept as an independent check of the incomplete-gamma route; reliable for
/// x up to a few hundred.
double posterior_mean_uniform01(int r, std::int64_t x);

/// Closed form of the posterior mean under Beta(v, w) with integer shapes,
/// via the alternating binomial expansion. Positive and negative terms are
/// summed separately in log space; throws NumericError when cancellation
/// would cost more than 1e6 ulps.
double posterior_mean_beta(int v, int w, int r, std::int64_t x);

// Posterior mean, second moment and marginal pmf on x = r..cap.
class BayesTable {
 public:
  BayesTable(Prior prior, SupportCap cap, std::vector<double> theta, std::vector<double> second_moment,
             std::vector<double> marginal);

  int r() const { return cap_.r; }
  std::int64_t cap() const { return cap_.cap; }
  const SupportCap& support() const { return cap_; }
  const Prior& prior() const { return prior_; }
  std::size_t size() const { return theta_.size(); }

  double theta(std::int64_t x) const { return theta_[index(x)]; }
  double second_moment(std::int64_t x) const { return second_moment_[index(x)]; }
  double marginal(std::int64_t x) const { return marginal_[index(x)]; }

  const std::vector<double>& thetas() const { return theta_; }
  const std::vector<double>& second_moments() const { return second_moment_; }
  const std::vector<double>& marginals() const { return marginal_; }

  // 1 - sum of marginals over the table.
  double missing_mass() const;

 private:
  std::size_t index(std::int64_t x) const;

  Prior prior_;
  SupportCap cap_;
  std::vector<double> theta_;
  std::vector<double> second_moment_;
  std::vector<double> marginal_;
};

/// Tabulates the Bayes rule over [r, cap.cap]. `threads` = 0 picks the
/// hardware concurrency; results do not depend on it.
BayesTable build_bayes_table(const Prior& g, const SupportCap& cap, unsigned threads = 1);

/// Cap at the prior's support supremum. Throws UsageError when the support
/// reaches 1, where no finite cap bounds the tail.
SupportCap risk_cap(const Prior& g, int r, double eps = kRiskTailEps);

}  // namespace bteb
