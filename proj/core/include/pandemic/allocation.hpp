#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pandemic/demand.hpp"

namespace pandemic {

/// One period of the multi-region allocation problem.
struct RegionalPeriodDemand {
  std::vector<double> demand;  // X^(i)
  std::vector<double> weights;  // omega^(i)
  std::vector<double> shortage_cost;  // theta+^(i)
  std::vector<double> surplus_cost;  // theta-^(i)

  std::size_t regions() const noexcept { return demand.size(); }
  void validate() const;
};

enum class AllocationBranch { Surplus, Shortage };

std::string_view to_string(AllocationBranch branch) noexcept;

struct PeriodAllocation {
  std::vector<double> allocated;  // K^(i), input region order
  AllocationBranch branch = AllocationBranch::Shortage;
  /// Number of regions served under shortage (the frugal index I).
  std::optional<std::size_t> frugality_index;
  /// Harmonic weights B^(i) that split the surplus or the shortage.
  std::vector<double> harmonic_weights;
  /// Set if the surplus formula left some region below its demand.
  bool below_demand_in_surplus = false;
};

/// B^(i) = (1/(omega theta))^(i) / sum_{r in subset} (1/(omega theta))^(r) on
/// `subset`, zero elsewhere. Throws EmptySubset for an empty subset and
/// InvalidArgument if some omega theta on the subset is not positive.
std::vector<double> harmonic_weights(std::span<const double> weights, std::span<const double> costs,
                                     std::span<const std::size_t> subset);

/// Optimal split of `supply` units across regions.
///
/// Surplus (supply > sum X): every region gets its demand plus a harmonic
/// share of the excess, weighted by 1/(omega theta-).
///
/// Shortage (supply <= sum X): regions with positive demand are ranked by
/// omega theta+ X (descending, ties by input order) and the frugality test
/// picks the number I of top-ranked regions to serve: supply must not exceed
/// their combined demand, and the holistic rule
///   K~[i] = X[i] - B~[i] (sum_{r<=I} X[r] - supply)
/// must be non-negative on the served regions and negative on the rest. The
/// served regions share the shortfall by their harmonic weights B~; everybody
/// else gets nothing.
PeriodAllocation allocate_period(const RegionalPeriodDemand& period, double supply);

/// Normalisation for allocation residuals: max(1, supply, max omega theta± X).
double allocation_scale(const RegionalPeriodDemand& period, double supply);

/// Largest violation of the optimality conditions of
///   min sum_i omega (theta+/2 (X-K)_+^2 + theta-/2 (K-X)_+^2)
///   s.t. sum_i K^(i) = supply, K^(i) >= 0,
/// with the budget multiplier and the bound multipliers recovered from the
/// allocation itself. Zero at an optimum.
double allocation_kkt_residual(const RegionalPeriodDemand& period, double supply,
                               const PeriodAllocation& allocation);

/// Day-by-region cost inputs for a horizon; outer index region, inner day.
struct RegionalCosts {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> shortage_cost;
  std::vector<std::vector<double>> surplus_cost;
};

struct AllocationPlan {
  std::vector<std::string> regions;
  std::vector<double> supply;  // K_j, index 0 is day 1
  std::vector<PeriodAllocation> periods;  // one per day
  std::vector<double> kkt_residuals;  // one per day

  /// Allocation to `region` on day `day` (1-based).
  double allocated(std::size_t region, std::size_t day) const {
    return periods.at(day - 1).allocated.at(region);
  }
};

/// omega_j^(i) proportional to the remaining demand sum_{t>=j} X_t^(i),
/// normalised to sum to one across regions each day. A region with no
/// remaining demand keeps a 1e-12 floor so its harmonic weight stays finite;
/// a day on which no region has remaining demand gets uniform weights.
std::vector<std::vector<double>> remaining_demand_weights(std::span<const DemandSeries> demand);

/// Uniform costs for every region and day.
RegionalCosts uniform_regional_costs(std::size_t regions, std::size_t days, double weight,
                                     double shortage_cost, double surplus_cost);

/// Applies allocate_period independently to every day. For durable
/// resources `supply` is the available stock K0 + a*j; for single-use
/// resources it is the day's release k_j. Periods are evaluated on up to
/// `threads` worker threads; the result does not depend on the thread count.
AllocationPlan allocate_horizon(std::span<const DemandSeries> demand, const RegionalCosts& costs,
                                std::span<const double> supply, unsigned threads = 1);

}  // namespace pandemic
