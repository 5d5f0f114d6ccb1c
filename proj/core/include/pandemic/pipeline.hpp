#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pandemic/allocation.hpp"
#include "pandemic/cost_model.hpp"
#include "pandemic/demand.hpp"
#include "pandemic/epidemic.hpp"
#include "pandemic/scenario.hpp"
#include "pandemic/stockpile_durable.hpp"
#include "pandemic/stockpile_singleuse.hpp"

namespace pandemic {

enum class ResourceSelection { Durable, SingleUse, All };

enum class PipelineStage {
  Simulate,  // Pillar I only
  Demand,  // plus demand projection
  Stockpile,  // plus the central stockpile
  Allocate,  // plus the regional allocation
};

struct PipelineOptions {
  ResourceSelection resources = ResourceSelection::All;
  PipelineStage stop_after = PipelineStage::Allocate;
  /// Overrides the scenario's RK4 substeps when set.
  std::optional<int> substeps;
  /// Worker threads for regions and allocation periods; 0 picks the hardware
  /// concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct RegionTrajectory {
  std::string label;
  Trajectory trajectory;
};

struct ResourcePlan {
  ResourceKind kind = ResourceKind::Durable;
  std::vector<DemandSeries> regional_demand;  // scenario region order
  DemandSeries aggregate_demand;
  CostModel costs;
  /// Durable resources only.
  std::optional<StockpileResult> stockpile;
  /// Single-use resources only.
  std::optional<DistributionSchedule> schedule;
  /// Daily amount to allocate: K0 + a*j for durable, k_j for single-use.
  std::vector<double> supply;
  std::optional<AllocationPlan> allocation;

  double initial_stockpile() const noexcept;
  double objective() const noexcept;
  double max_allocation_residual() const noexcept;
};

struct PipelineResult {
  std::string scenario;
  std::size_t horizon = 0;
  std::vector<RegionTrajectory> trajectories;
  std::vector<ResourcePlan> resources;  // durable before single-use

  const ResourcePlan* find(ResourceKind kind) const noexcept;
};

/// Runs Pillar I (simulation), demand projection, Pillar II (stockpile) and
/// Pillar III (allocation) for each selected resource the scenario defines,
/// up to `options.stop_after`. Module errors are rethrown with the pillar,
/// resource and region attached.
PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options = {});

}  // namespace pandemic
