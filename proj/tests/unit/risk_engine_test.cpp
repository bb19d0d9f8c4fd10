#include "bteb/risk_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "bteb/errors.hpp"

namespace bteb {
namespace {

class StudyTable : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Prior g = Prior::uniform(0.5, 0.8);
    table_ = new BayesTable(build_bayes_table(g, risk_cap(g, 3)));
  }
  static void TearDownTestSuite() {
    delete table_;
    table_ = nullptr;
  }
  static BayesTable* table_;
};
BayesTable* StudyTable::table_ = nullptr;

TEST(BayesRisk, ZeroForPointMass) {
  const Prior g = Prior::point_mass(0.6);
  const BayesTable t = build_bayes_table(g, support_cap(3, 0.6, 1e-12));
  EXPECT_NEAR(bayes_risk(t), 0.0, 1e-15);
}

TEST_F(StudyTable, BayesRiskBelowPriorVariance) {
  const double risk = bayes_risk(*table_);
  EXPECT_GT(risk, 0.0);
  EXPECT_LT(risk, table_->prior().variance());
  EXPECT_NEAR(risk, 0.0068976, 1e-6);
}

TEST_F(StudyTable, BayesRuleHasZeroRegret) {
  EXPECT_EQ(regret_exact(bayes_estimator(*table_), *table_), 0.0);
  EXPECT_EQ(signed_gap(bayes_estimator(*table_), *table_), 0.0);
}

TEST_F(StudyTable, ConstantShiftCostsItsSquare) {
  std::vector<double> shifted = table_->thetas();
  for (double& v : shifted) v += 0.1;
  const EstimatorTable est(3, table_->cap(), shifted, EstimatorTable::Label::eb);
  const double mass = 1.0 - table_->missing_mass();
  EXPECT_NEAR(regret_exact(est, *table_), 0.01 * mass, 1e-14);
  EXPECT_NEAR(signed_gap(est, *table_), 0.1 * mass, 1e-14);
}

TEST_F(StudyTable, MleRegret) {
  const EstimatorTable mle = mle_table(3, table_->cap());
  EXPECT_EQ(mle.at(3), 0.0);
  EXPECT_NEAR(mle.at(6), 0.5, 1e-16);
  EXPECT_NEAR(regret_exact(mle, *table_), 0.093477, 5e-6);
  EXPECT_NEAR(signed_gap(mle, *table_), -0.1625, 5e-4);
}

TEST_F(StudyTable, MismatchedTablesRejected) {
  EXPECT_THROW(regret_exact(mle_table(3, table_->cap() - 1), *table_), UsageError);
  EXPECT_THROW(regret_exact(mle_table(2, table_->cap()), *table_), UsageError);
}

TEST(MeanSe, Basic) {
  const MeanSe m = mean_and_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.se, std::sqrt(5.0 / 3.0) / 2.0);
  EXPECT_THROW(mean_and_se({1.0}), DomainError);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.reps = 1;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = ExperimentConfig{};
  cfg.prior = Prior::uniform(0.5, 1.0);
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = ExperimentConfig{};
  cfg.grid_m = 50;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST_F(StudyTable, ReplicationIsDeterministic) {
  ExperimentConfig cfg;
  cfg.grid_m = 500;
  const auto a = run_replication(cfg, 3, *table_);
  const auto b = run_replication(cfg, 3, *table_);
  EXPECT_EQ(a.observations, b.observations);
  EXPECT_EQ(a.regret_eb, b.regret_eb);
  EXPECT_EQ(a.regret_mono, b.regret_mono);
  EXPECT_EQ(a.observations.size(), 100u);
  const auto c = run_replication(cfg, 4, *table_);
  EXPECT_NE(a.observations, c.observations);
}

TEST_F(StudyTable, ExperimentIndependentOfThreads) {
  ExperimentConfig cfg;
  cfg.reps = 4;
  cfg.grid_m = 500;
  const ExperimentReport one = run_experiment(cfg, *table_);
  cfg.threads = 3;
  const ExperimentReport many = run_experiment(cfg, *table_);
  ASSERT_EQ(one.replications.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(one.replications[i].regret_eb, many.replications[i].regret_eb);
    EXPECT_EQ(one.replications[i].regret_mono, many.replications[i].regret_mono);
  }
  EXPECT_EQ(one.s_eb_mean, many.s_eb_mean);
  EXPECT_EQ(one.s_mono_se, many.s_mono_se);
}

TEST_F(StudyTable, MonotoneNeverWorseOnStudyRuns) {
  ExperimentConfig cfg;
  cfg.reps = 2;
  const ExperimentReport rep = run_experiment(cfg, *table_);
  for (const auto& r : rep.replications) {
    EXPECT_LE(r.regret_mono, r.regret_eb);
    EXPECT_FALSE(r.monotone.has_value());
  }
  const ReplicationResult kept = run_replication(cfg, rep.replications[0].index, *table_);
  ASSERT_TRUE(kept.monotone.has_value());
  EXPECT_TRUE(kept.monotone->is_nondecreasing());
  EXPECT_EQ(kept.regret_mono, rep.replications[0].regret_mono);
  EXPECT_LE(rep.s_mono_mean, rep.s_eb_mean);
  EXPECT_NEAR(rep.s_mle, 0.093477, 5e-6);
  EXPECT_EQ(rep.cap, table_->cap());
  EXPECT_LE(rep.sampling_cap, rep.cap);
  EXPECT_EQ(rep.truncation.draws, 200u);
  EXPECT_LT(rep.max_adjustment, 1e-10);
}

}  // namespace
}  // namespace bteb
