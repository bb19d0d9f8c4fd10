#include <benchmark/benchmark.h>

#include <vector>

#include "bteb/bteb.hpp"

using namespace bteb;

namespace {

void BM_RegLowerGamma(benchmark::State& state) {
  const double s = static_cast<double>(state.range(0));
  double x = 0.65 * s;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reg_lower_gamma(s, x));
    x += 1e-9;
  }
}
BENCHMARK(BM_RegLowerGamma)->Arg(10)->Arg(100)->Arg(1000);

void BM_BuildBayesTable(benchmark::State& state) {
  const Prior g = Prior::uniform(0.5, 0.8);
  const SupportCap cap = risk_cap(g, 3);
  for (auto _ : state) benchmark::DoNotOptimize(build_bayes_table(g, cap).size());
}
BENCHMARK(BM_BuildBayesTable)->Unit(benchmark::kMillisecond);

void BM_BuildBayesTableBeta(benchmark::State& state) {
  const Prior g = Prior::beta(2, 3);
  const SupportCap cap = support_cap(3, 0.9, kRiskTailEps);
  for (auto _ : state) benchmark::DoNotOptimize(build_bayes_table(g, cap).size());
}
BENCHMARK(BM_BuildBayesTableBeta)->Unit(benchmark::kMillisecond);

void BM_Monotonize(benchmark::State& state) {
  const Prior g = Prior::uniform(0.5, 0.8);
  const std::int64_t cap = risk_cap(g, 3).cap;
  Rng rng(1);
  std::vector<std::int64_t> xs;
  for (int i = 0; i < 500; ++i) xs.push_back(sample_inverse(BTParams(3, g.sample(rng)), rng, cap));
  const EstimatorTable eb = eb_table(EBHistory(3, xs), cap);
  const ActionGrid grid = ActionGrid::uniform(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(monotonize(eb, grid).max_adjustment);
}
BENCHMARK(BM_Monotonize)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Replication(benchmark::State& state) {
  const Prior g = Prior::uniform(0.5, 0.8);
  const BayesTable bayes = build_bayes_table(g, risk_cap(g, 3));
  ExperimentConfig cfg;
  cfg.n = state.range(0);
  int k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replication(cfg, k++, bayes, false).regret_mono);
}
BENCHMARK(BM_Replication)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
