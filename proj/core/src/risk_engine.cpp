#include "bteb/risk_engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {
namespace {

void check_same_support(const EstimatorTable& est, const BayesTable& bayes) {
  if (est.r() != bayes.r() || est.cap() != bayes.cap()) {
    throw UsageError("estimator and Bayes tables must share r and cap");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (r < 1) throw DomainError("r must be >= 1");
  if (n < 1) throw DomainError("n must be >= 1");
  if (reps < 2) throw DomainError("reps must be >= 2");
  if (grid_m < 100) throw DomainError("grid_m must be >= 100");
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw DomainError("tail_eps must lie in (0, 1)");
  if (!(sampling_eps > 0.0 && sampling_eps < 1.0)) throw DomainError("sampling_eps must lie in (0, 1)");
  if (!(prior.support_hi() < 1.0)) throw DomainError("experiments need a prior supported below 1");
}

double bayes_risk(const BayesTable& table) {
  CompensatedSum s;
  const auto& m = table.marginals();
  const auto& t = table.thetas();
  const auto& s2 = table.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) s.add(m[i] * std::max(0.0, s2[i] - t[i] * t[i]));
  return s.value();
}

double regret_exact(const EstimatorTable& est, const BayesTable& bayes) {
  check_same_support(est, bayes);
  CompensatedSum s;
  const auto& m = bayes.marginals();
  const auto& t = bayes.thetas();
  const auto& v = est.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d = v[i] - t[i];
    s.add(m[i] * d * d);
  }
  return s.value();
}

double signed_gap(const EstimatorTable& est, const BayesTable& bayes) {
  check_same_support(est, bayes);
  CompensatedSum s;
  for (std::size_t i = 0; i < bayes.size(); ++i) {
    s.add(bayes.marginals()[i] * (est.values()[i] - bayes.thetas()[i]));
  }
  return s.value();
}

EstimatorTable mle_table(int r, std::int64_t cap) {
  if (r < 1 || cap < r) throw DomainError("mle_table requires cap >= r >= 1");
  std::vector<double> v(static_cast<std::size_t>(cap - r + 1));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = static_cast<double>(r + static_cast<std::int64_t>(i));
    v[i] = (x - r) / x;
  }
  return EstimatorTable(r, cap, std::move(v), EstimatorTable::Label::mle);
}

EstimatorTable bayes_estimator(const BayesTable& bayes) {
  return EstimatorTable(bayes.r(), bayes.cap(), bayes.thetas(), EstimatorTable::Label::bayes);
}

ReplicationResult run_replication(const ExperimentConfig& cfg, int k, const BayesTable& bayes,
                                  bool keep_tables) {
  const std::int64_t sampling_cap =
      std::min(bayes.cap(), support_cap(cfg.r, cfg.prior.support_hi(), cfg.sampling_eps).cap);
  Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(k));
  ReplicationResult out;
  out.index = k;
  out.observations.reserve(static_cast<std::size_t>(cfg.n));
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    const double theta = cfg.prior.sample(rng);
    out.observations.push_back(sample_inverse(BTParams(cfg.r, theta), rng, sampling_cap, &out.truncation));
  }
  const EBHistory history(cfg.r, out.observations);
  EstimatorTable eb = eb_table(history, bayes.cap(), cfg.qzero);
  MonotoneRule rule = monotonize(eb, ActionGrid::uniform(cfg.grid_m));
  out.regret_eb = regret_exact(eb, bayes);
  out.regret_mono = regret_exact(rule.result, bayes);
  out.max_adjustment = rule.max_adjustment;
  if (keep_tables) {
    out.eb = std::move(eb);
    out.monotone = std::move(rule.result);
  }
  return out;
}

MeanSe mean_and_se(const std::vector<double>& values) {
  if (values.size() < 2) throw DomainError("standard error needs at least two values");
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  return {mean, std::sqrt(ss.value() / (n - 1.0)) / std::sqrt(n)};
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SupportCap cap = support_cap(cfg.r, cfg.prior.support_hi(), cfg.tail_eps);
  const BayesTable bayes = build_bayes_table(cfg.prior, cap, cfg.threads);
  return run_experiment(cfg, bayes);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const BayesTable& bayes) {
  cfg.validate();
  if (bayes.r() != cfg.r) throw UsageError("Bayes table built for a different r");
  ExperimentReport report;
  report.config = cfg;
  report.cap = bayes.cap();
  report.sampling_cap =
      std::min(bayes.cap(), support_cap(cfg.r, cfg.prior.support_hi(), cfg.sampling_eps).cap);
  report.replications.resize(static_cast<std::size_t>(cfg.reps));

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.reps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.reps));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (int k = next++; k < cfg.reps && !failed; k = next++) {
      try {
        report.replications[static_cast<std::size_t>(k)] = run_replication(cfg, k + 1, bayes, false);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> eb;
  std::vector<double> mono;
  for (const auto& rep : report.replications) {
    eb.push_back(rep.regret_eb);
    mono.push_back(rep.regret_mono);
    report.truncation.draws += rep.truncation.draws;
    report.truncation.truncated += rep.truncation.truncated;
    report.max_adjustment = std::max(report.max_adjustment, rep.max_adjustment);
  }
  const MeanSe e = mean_and_se(eb);
  const MeanSe m = mean_and_se(mono);
  report.s_eb_mean = e.mean;
  report.s_eb_se = e.se;
  report.s_mono_mean = m.mean;
  report.s_mono_se = m.se;
  const EstimatorTable mle = mle_table(cfg.r, bayes.cap());
  report.s_mle = regret_exact(mle, bayes);
  report.mle_signed_gap = signed_gap(mle, bayes);
  report.bayes_risk = bayes_risk(bayes);
  report.marginal_missing_mass = bayes.missing_mass();
  return report;
}

}  // namespace bteb
