#include <benchmark/benchmark.h>

#include "bioinsure/montecarlo.hpp"
#include "bioinsure/optimize.hpp"
#include "bioinsure/valuation.hpp"

namespace {

using namespace bioinsure;

ScenarioSpec reference() {
  return ScenarioSpec{.service = ServiceModel{.mu_max = 10.0, .k_mu = 0.3, .sigma_0 = 2.0, .k_sigma = 0.2},
                      .cost = CostModel{.c1 = 0.0, .c2 = 0.05},
                      .preference = RiskPreference{.rho = 1.0},
                      .market = std::nullopt,
                      .v_bounds = Interval{0.0, 50.0}};
}

void BM_ValuationGrid(benchmark::State& state) {
  const auto s = reference();
  const auto grid = linear_grid(0.0, 50.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(s, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValuationGrid)->Arg(101)->Arg(10001);

void BM_OptimalBiodiversity(benchmark::State& state) {
  const auto s = reference();
  for (auto _ : state) benchmark::DoNotOptimize(optimal_biodiversity(s));
}
BENCHMARK(BM_OptimalBiodiversity);

void BM_JointOptimum(benchmark::State& state) {
  const auto s = reference();
  for (auto _ : state) benchmark::DoNotOptimize(joint_optimum(s, 0.2));
}
BENCHMARK(BM_JointOptimum);

void BM_McCertaintyEquivalent(benchmark::State& state) {
  const auto s = reference();
  const SamplerConfig cfg{.n_samples = static_cast<std::uint64_t>(state.range(0)), .seed = 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_certainty_equivalent(s, BiodiversityLevel(5.0), std::nullopt, cfg, Execution{1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McCertaintyEquivalent)->Arg(100000);

void BM_BufferPool(benchmark::State& state) {
  const BufferPoolSpec spec{.issuance_per_period = 100.0, .buffer_fraction = 0.2, .reversal_probability = 0.05,
                            .reversal_severity = 0.3, .horizon = 40};
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_buffer_pool(spec, trials, SamplerConfig{.seed = 2}, Execution{1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BufferPool)->Arg(10000);

}  // namespace
