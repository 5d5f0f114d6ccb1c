#include "check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "pandemic/error.hpp"
#include "pandemic/oracle.hpp"

namespace pandemic::tools {
namespace {

constexpr int kWindows = 5;
constexpr int kAllocationDays = 20;
constexpr std::size_t kGridPoints = 20000;

std::string fmt(const char* pattern, double a, double b) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, a, b);
  return buffer;
}

template <class T>
std::vector<T> slice(const std::vector<T>& v, std::size_t first, std::size_t count) {
  return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(first),
                        v.begin() + static_cast<std::ptrdiff_t>(first + count));
}

CheckLine check_durable(const ResourcePlan& plan) {
  const auto& x = plan.aggregate_demand.values;
  const double k0 = plan.stockpile->initial_stockpile;
  double hi = 2.0 * k0 + 1.0;
  for (double y : projected_shortage(x, plan.costs.production_rate)) hi = std::max(hi, y + 1.0);
  const double step = hi / static_cast<double>(kGridPoints);
  const double grid = oracle::grid_search_k0(x, plan.costs, 0.0, hi, step);
  return {std::abs(grid - k0) <= 2.0 * step,
          fmt("durable K0 %.6g vs grid %.6g", k0, grid)};
}

CheckLine check_singleuse(const ResourcePlan& plan, std::mt19937_64& rng) {
  const auto& x = plan.aggregate_demand.values;
  const std::size_t m = x.size();
  const std::size_t width = std::min(m, std::size_t{6});
  std::uniform_int_distribution<std::size_t> pick(0, m - width);
  double worst = 0.0;
  for (int w = 0; w < kWindows; ++w) {
    const std::size_t first = pick(rng);
    const auto demand = slice(x, first, width);
    CostModel costs = plan.costs;
    costs.weights = slice(costs.weights, first, width);
    costs.shortage_cost = slice(costs.shortage_cost, first, width);
    costs.surplus_cost = slice(costs.surplus_cost, first, width);
    costs.possession_cost = slice(costs.possession_cost, first, width);
    const auto fast = optimize_schedule(demand, costs);
    const auto slow = oracle::brute_force_schedule(demand, costs);
    const double gap = std::abs(fast.objective - slow.objective) /
                       std::max(1.0, std::abs(slow.objective));
    worst = std::max(worst, gap);
  }
  return {worst <= 1e-6, fmt("single-use windows: worst relative objective gap %.3g (limit %.0e)",
                             worst, 1e-6)};
}

CheckLine check_allocation(const ResourcePlan& plan, const Scenario& scenario,
                           std::mt19937_64& rng) {
  const std::size_t n = std::min(plan.regional_demand.size(), oracle::kMaxAllocationRegions);
  const std::size_t m = plan.supply.size();
  const auto& spec = *scenario.resource(plan.kind);
  const std::vector<DemandSeries> demand(plan.regional_demand.begin(),
                                         plan.regional_demand.begin() + static_cast<std::ptrdiff_t>(n));
  const auto costs = allocation_costs(spec, demand);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  double worst = 0.0;
  for (int d = 0; d < kAllocationDays; ++d) {
    const std::size_t j = pick(rng);
    RegionalPeriodDemand period;
    double supply = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      period.demand.push_back(demand[i].values[j]);
      period.weights.push_back(costs.weights[i][j]);
      period.shortage_cost.push_back(costs.shortage_cost[i][j]);
      period.surplus_cost.push_back(costs.surplus_cost[i][j]);
      supply += plan.allocation->allocated(i, j + 1);
    }
    const auto fast = allocate_period(period, supply).allocated;
    const auto slow = oracle::brute_force_allocation(period, supply);
    const double scale = allocation_scale(period, supply);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]) / scale);
  }
  return {worst <= 1e-4, fmt("allocation days: worst scaled component gap %.3g (limit %.0e)", worst,
                             1e-4)};
}

}  // namespace

std::vector<CheckLine> run_checks(const PipelineResult& result, const Scenario& scenario,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckLine> lines;
  for (const auto& plan : result.resources) {
    const std::string name(to_string(plan.kind));
    try {
      if (plan.stockpile) lines.push_back(check_durable(plan));
      if (plan.schedule) lines.push_back(check_singleuse(plan, rng));
      if (plan.allocation) lines.push_back(check_allocation(plan, scenario, rng));
    } catch (const Error& e) {
      lines.push_back({false, name + ": " + e.what()});
    }
  }
  return lines;
}

}  // namespace pandemic::tools
