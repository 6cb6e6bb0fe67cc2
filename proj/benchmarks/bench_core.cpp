#include <benchmark/benchmark.h>

#include "pdsq/bounds.hpp"
#include "pdsq/detectors.hpp"
#include "pdsq/model.hpp"
#include "pdsq/oracle.hpp"
#include "pdsq/random.hpp"
#include "pdsq/strategies.hpp"

using namespace pdsq;

static void BM_EdgeValue(benchmark::State& state) {
  const auto inst = Instance::sample(ModelParams::bernoulli(10000, 1000, 1.0, 0.5), Hypothesis::alternative, 1);
  Vertex i = 0, j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inst.edge_value(i, j));
    if (++j == 10000) j = ++i + 1;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EdgeValue);

static void BM_OracleQuery(benchmark::State& state) {
  const auto inst = Instance::sample(ModelParams::bernoulli(2000, 100, 1.0, 0.5), Hypothesis::alternative, 2);
  const auto plan = uniform_plan(2000, 100000, 3);
  for (auto _ : state) {
    BudgetedOracle o(inst, plan.size(), BudgetMode::unique_pairs, false);
    benchmark::DoNotOptimize(execute(plan, o));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(plan.size()));
}
BENCHMARK(BM_OracleQuery)->Unit(benchmark::kMillisecond);

static void BM_ScanExact(benchmark::State& state) {
  const auto M = static_cast<std::uint32_t>(state.range(0));
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  ScanConfig cfg;
  cfg.M = M;
  cfg.search_mode = SearchMode::exact;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto inst = Instance::sample(params, Hypothesis::null, ++seed);
    BudgetedOracle o(inst, binom2(M), BudgetMode::unique_pairs, false);
    benchmark::DoNotOptimize(scan_test(o, params, cfg, seed));
  }
}
BENCHMARK(BM_ScanExact)->Arg(10)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_DegreeTest(benchmark::State& state) {
  const auto params = ModelParams::bernoulli(10000, 1000, 1.0, 0.5);
  DegreeConfig cfg;
  cfg.n_prime = 2000;
  cfg.M = static_cast<std::uint32_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto inst = Instance::sample(params, Hypothesis::alternative, ++seed);
    BudgetedOracle o(inst, bipartite_unique_pairs(cfg.n_prime, cfg.M), BudgetMode::unique_pairs, false);
    benchmark::DoNotOptimize(degree_test(o, params, cfg, seed));
  }
}
BENCHMARK(BM_DegreeTest)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_OverlapEstimate(benchmark::State& state) {
  const auto plan = clique_pattern_plan(2000, static_cast<std::uint32_t>(state.range(0)), 5).plan;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_square_overlap_estimate(plan, 2000, 40, 1.0, 10000, 6, 1));
  }
}
BENCHMARK(BM_OverlapEstimate)->Arg(30)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
