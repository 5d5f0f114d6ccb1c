#include "pandemic/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

template <class F>
auto with_context(const std::string& context, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    fail(e.code(), context + ": " + e.what());
  }
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RegionTrajectory> simulate_regions(const Scenario& scenario, int substeps,
                                               unsigned threads) {
  const std::size_t n = scenario.regions.size();
  std::vector<std::optional<Trajectory>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      const auto& r = scenario.regions[i];
      slots[i] = simulate(r.initial, r.params, scenario.horizon, substeps);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) run(i);
      });
    }
  }

  std::vector<RegionTrajectory> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& label = scenario.regions[i].label;
    if (errors[i]) {
      with_context("Pillar I, region " + label, [&] { std::rethrow_exception(errors[i]); });
    }
    out.push_back(RegionTrajectory{label, std::move(*slots[i])});
  }
  return out;
}

ResourcePlan plan_resource(const Scenario& scenario, const ResourceSpec& spec,
                           const std::vector<RegionTrajectory>& trajectories,
                           const PipelineOptions& options, unsigned threads) {
  ResourcePlan plan;
  plan.kind = spec.kind;
  const std::string name(to_string(spec.kind));

  for (const auto& region : trajectories) {
    auto series = with_context("demand " + name + ", region " + region.label, [&] {
      return spec.kind == ResourceKind::Durable
                 ? ventilator_demand(region.trajectory, scenario.assessment)
                 : ppe_demand(region.trajectory, scenario.assessment);
    });
    series.region = region.label;
    plan.regional_demand.push_back(std::move(series));
  }
  plan.aggregate_demand = aggregate(plan.regional_demand);
  if (options.stop_after == PipelineStage::Demand) return plan;

  plan.costs = stockpile_cost_model(spec, plan.aggregate_demand.values);
  with_context("Pillar II " + name, [&] {
    if (spec.kind == ResourceKind::Durable) {
      plan.stockpile = optimal_initial_stockpile(plan.aggregate_demand.values, plan.costs);
      plan.supply = supply_path(plan.stockpile->initial_stockpile, spec.production_rate,
                                scenario.horizon);
    } else {
      plan.schedule = optimize_schedule(plan.aggregate_demand.values, plan.costs);
      plan.supply = plan.schedule->distribution;
    }
  });
  if (options.stop_after == PipelineStage::Stockpile) return plan;

  plan.allocation = with_context("Pillar III " + name, [&] {
    return allocate_horizon(plan.regional_demand, allocation_costs(spec, plan.regional_demand),
                            plan.supply, threads);
  });
  return plan;
}

}  // namespace

double ResourcePlan::initial_stockpile() const noexcept {
  if (stockpile) return stockpile->initial_stockpile;
  if (schedule) return schedule->initial_stockpile;
  return 0.0;
}

double ResourcePlan::objective() const noexcept {
  if (stockpile) return stockpile->objective;
  if (schedule) return schedule->objective;
  return 0.0;
}

double ResourcePlan::max_allocation_residual() const noexcept {
  if (!allocation || allocation->kkt_residuals.empty()) return 0.0;
  return *std::max_element(allocation->kkt_residuals.begin(), allocation->kkt_residuals.end());
}

const ResourcePlan* PipelineResult::find(ResourceKind kind) const noexcept {
  for (const auto& r : resources) {
    if (r.kind == kind) return &r;
  }
  return nullptr;
}

PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
  scenario.validate();
  const int substeps = options.substeps.value_or(scenario.substeps);
  if (substeps < 1) fail(Errc::ValidationError, "substeps: must be >= 1");
  const unsigned threads = worker_count(options.threads);

  PipelineResult result;
  result.scenario = scenario.name;
  result.horizon = scenario.horizon;
  result.trajectories = simulate_regions(scenario, substeps, threads);
  if (options.stop_after == PipelineStage::Simulate) return result;

  const bool want_durable = options.resources != ResourceSelection::SingleUse;
  const bool want_singleuse = options.resources != ResourceSelection::Durable;
  if (want_durable && scenario.durable) {
    result.resources.push_back(
        plan_resource(scenario, *scenario.durable, result.trajectories, options, threads));
  }
  if (want_singleuse && scenario.singleuse) {
    result.resources.push_back(
        plan_resource(scenario, *scenario.singleuse, result.trajectories, options, threads));
  }
  return result;
}

}  // namespace pandemic
