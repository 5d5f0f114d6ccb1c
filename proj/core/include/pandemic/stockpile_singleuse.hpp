#pragma once

#include <span>
#include <vector>

#include "pandemic/cost_model.hpp"

namespace pandemic {

/// Initial stockpile and daily release plan for a single-use resource.
struct DistributionSchedule {
  double initial_stockpile = 0.0;  // K0
  std::vector<double> distribution;  // k_1..k_m
  std::vector<double> storage;  // K_0..K_m
  /// Shadow value of one unit held in central storage on day j (index 0 is
  /// day 1). Non-increasing; drops only on days the storage runs empty.
  std::vector<double> storage_price;
  double objective = 0.0;
  double kkt_residual = 0.0;
};

/// Central storage K_0..K_m under
///   K_j = K_{j-1} + a - k_j + (k_j - X_j)_+,  K_0 = k0.
/// Undistributed oversupply returns to storage. The result may be negative;
/// feasibility is the caller's concern.
std::vector<double> storage_trajectory(double k0, std::span<const double> distribution,
                                       double production_rate, std::span<const double> demand);

/// sum_j omega_j (theta+/2 (X_j-k_j)_+^2 + theta-/2 (X_j-k_j)_-^2 + c_j K_j) + c0 K0.
/// If `schedule.storage` is filled it must match storage_trajectory() or
/// InconsistentStorage is thrown.
double singleuse_objective(const DistributionSchedule& schedule, std::span<const double> demand,
                           const SingleUseCostModel& costs);

/// Normalisation for schedule residuals: max(1, max_j omega_j theta+_j X_j).
double schedule_scale(std::span<const double> demand, const SingleUseCostModel& costs);

/// Largest violation of the optimality conditions of the no-oversupply
/// program, using `schedule.storage_price` as the multipliers of the storage
/// constraints. Covers stationarity in k and K0, primal feasibility, dual
/// feasibility and complementary slackness.
double schedule_kkt_residual(const DistributionSchedule& schedule, std::span<const double> demand,
                             const SingleUseCostModel& costs);

/// Solves
///   min  sum_j omega_j (theta+_j/2 (X_j - k_j)^2 + c_j K_j) + c0 K0
///   s.t. K_j = K_{j-1} + a - k_j >= 0,  0 <= k_j <= X_j,  K0 >= 0.
///
/// Oversupply never helps, so theta- does not enter. Days are pooled into
/// blocks separated by days on which storage runs out; each block releases
/// its supply at a common storage price, and adjacent blocks merge whenever a
/// later block would be priced at least as high as an earlier one. The first
/// block can buy initial stock at the marginal holding cost S, which caps its
/// price. Where the objective is flat in a release the smallest release is
/// chosen, and K0 is the least stockpile that keeps storage non-negative.
///
/// Throws SolverNotConverged if the returned point misses the optimality
/// tolerance 1e-6 * schedule_scale().
DistributionSchedule optimize_schedule(std::span<const double> demand,
                                       const SingleUseCostModel& costs);

}  // namespace pandemic
