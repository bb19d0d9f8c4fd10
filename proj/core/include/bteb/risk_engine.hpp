#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bteb/bayes_rule.hpp"
#include "bteb/bt_dist.hpp"
#include "bteb/eb_estimator.hpp"
#include "bteb/monotonizer.hpp"
#include "bteb/prior.hpp"

namespace bteb {

struct ExperimentConfig {
  int r = 3;
  Prior prior = Prior::uniform(0.5, 0.8);
  std::int64_t n = 100;
  int reps = 10;
  std::uint64_t seed = 1;
  int grid_m = kDefaultGridIntervals;
  double tail_eps = kRiskTailEps;
  double sampling_eps = kSamplingTailEps;
  QZeroConvention qzero = QZeroConvention::one;
  unsigned threads = 1;

  // Throws DomainError on an invalid combination.
  void validate() const;
};

/// Expected posterior variance: sum_x m(x) (E[Theta^2|x] - E[Theta|x]^2).
double bayes_risk(const BayesTable& table);

/// sum_x m(x) (est(x) - theta_G(x))^2. Throws UsageError on mismatched (r, cap).
double regret_exact(const EstimatorTable& est, const BayesTable& bayes);

/// sum_x m(x) (est(x) - theta_G(x)), the unsquared counterpart.
double signed_gap(const EstimatorTable& est, const BayesTable& bayes);

/// (x - r) / x.
EstimatorTable mle_table(int r, std::int64_t cap);

EstimatorTable bayes_estimator(const BayesTable& bayes);

struct ReplicationResult {
  int index = 0;
  double regret_eb = 0.0;
  double regret_mono = 0.0;
  double max_adjustment = 0.0;
  TruncationCounter truncation;
  std::vector<std::int64_t> observations;
  std::optional<EstimatorTable> eb;
  std::optional<EstimatorTable> monotone;
};

/// Draws n pairs (Theta_i, X_i) from the stream (seed, k), builds the EB and
/// monotone EB tables and returns their exact regrets.
ReplicationResult run_replication(const ExperimentConfig& cfg, int k, const BayesTable& bayes,
                                  bool keep_tables = true);

struct ExperimentReport {
  ExperimentConfig config;
  std::int64_t cap = 0;
  std::int64_t sampling_cap = 0;
  std::vector<ReplicationResult> replications;
  double s_eb_mean = 0.0;
  double s_eb_se = 0.0;
  double s_mono_mean = 0.0;
  double s_mono_se = 0.0;
  double s_mle = 0.0;
  double mle_signed_gap = 0.0;
  double bayes_risk = 0.0;
  double marginal_missing_mass = 0.0;
  TruncationCounter truncation;
  double max_adjustment = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Arithmetic mean and sample standard deviation / sqrt(count); needs >= 2 values.
MeanSe mean_and_se(const std::vector<double>& values);

/// Runs cfg.reps replications (in parallel when cfg.threads != 1) and
/// aggregates in replication order.
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const BayesTable& bayes);

}  // namespace bteb
