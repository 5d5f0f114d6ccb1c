#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pandemic/allocation.hpp"
#include "pandemic/cost_model.hpp"
#include "pandemic/stockpile_singleuse.hpp"

// Slow reference solvers that certify the production solvers in tests and in
// `pandemic-plan check`. They share nothing with the solvers except the
// objective and residual functions.
namespace pandemic::oracle {

inline constexpr std::size_t kMaxScheduleDays = 8;
inline constexpr std::size_t kMaxAllocationRegions = 4;

/// Grid point lo, lo + step, ... <= hi minimising durable_objective; ties go
/// to the smaller K0.
double grid_search_k0(std::span<const double> demand, const DurableCostModel& costs, double lo,
                      double hi, double step);

/// Single-use schedule by a dense primal-dual interior-point method on
/// (K0, k), run from `starts` initial points. Storage prices come from the
/// multipliers of the storage constraints. InstanceTooLarge beyond
/// kMaxScheduleDays days; SolverNotConverged if no start reaches a KKT
/// residual of 1e-6 * schedule_scale().
DistributionSchedule brute_force_schedule(std::span<const double> demand,
                                          const SingleUseCostModel& costs, int starts = 3,
                                          std::uint64_t seed = 1);

/// Period allocation by projected gradient descent on {sum K = supply, K >= 0}
/// with step `step` / max(omega theta), from `starts` initial points.
/// InstanceTooLarge beyond kMaxAllocationRegions regions; SolverNotConverged
/// if the best point misses a KKT residual of 1e-8 * allocation_scale().
std::vector<double> brute_force_allocation(const RegionalPeriodDemand& period, double supply,
                                           double step = 1.0, int starts = 6,
                                           std::uint64_t seed = 1);

}  // namespace pandemic::oracle
