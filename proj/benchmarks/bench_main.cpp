#include <benchmark/benchmark.h>

#include <random>

#include "pandemic/allocation.hpp"
#include "pandemic/epidemic.hpp"
#include "pandemic/pipeline.hpp"
#include "pandemic/stockpile_durable.hpp"
#include "pandemic/stockpile_singleuse.hpp"

namespace {

using namespace pandemic;

EpidemicParams params() {
  EpidemicParams p;
  p.population = 1e7;
  p.beta1 = 0.35 / p.population;
  p.beta2 = p.beta1 / 10;
  p.beta3 = p.beta1 / 20;
  p.gamma = 0.2;
  p.delta1 = 0.19;
  p.delta2 = 0.075;
  p.delta3 = 0.06;
  p.p1 = 0.01;
  p.p2 = 0.025;
  p.mu = 0.04;
  return p;
}

std::vector<double> demand(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(m);
  for (double& v : x) v = 1000 * u(rng);
  return x;
}

void BM_Simulate(benchmark::State& state) {
  const auto p = params();
  CompartmentState s;
  s.I1 = 100;
  s.S = p.population - 100;
  const auto days = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s, p, days));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(250)->Arg(1000);

void BM_DurableStockpile(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto x = demand(m, 1);
  const auto c = CostModel::uniform(m, 1, 1, 1000, 20, 1, 500);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_initial_stockpile(x, c));
}
BENCHMARK(BM_DurableStockpile)->Arg(250)->Arg(10000);

void BM_SingleUseSchedule(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto x = demand(m, 2);
  const auto c = CostModel::uniform(m, 400, 1, 1, 1, 0.01, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_schedule(x, c));
}
BENCHMARK(BM_SingleUseSchedule)->Arg(250)->Arg(2000);

void BM_AllocatePeriod(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RegionalPeriodDemand p;
  p.demand = demand(n, 3);
  p.weights.assign(n, 1.0);
  p.shortage_cost.assign(n, 1.0);
  p.surplus_cost.assign(n, 1.0);
  const double supply = 200.0 * static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_period(p, supply));
}
BENCHMARK(BM_AllocatePeriod)->Arg(3)->Arg(50);

void BM_Pipeline(benchmark::State& state) {
  const auto scenario = load_scenario(PANDEMIC_SCENARIO_DIR "/three_state.scn");
  PipelineOptions o;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(scenario, o));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace
