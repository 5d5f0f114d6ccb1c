#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pandemic/cost_model.hpp"

namespace pandemic {

struct StockpileResult {
  double initial_stockpile = 0.0;  // K0*
  std::size_t pivot = 0;  // J, 1-based rank in the ascending shortage order
  double unclamped = 0.0;  // K0' before clamping at zero
  double objective = 0.0;
};

/// Y_j = X_j - a*j for j = 1..m (negative when production has caught up).
std::vector<double> projected_shortage(std::span<const double> demand, double production_rate);

/// Cost of holding an initial stockpile `k0` of a durable resource:
///   sum_j omega_j (theta+_j/2 (X_j - K_j)_+^2 + theta-_j/2 (X_j - K_j)_-^2 + c_j K_j) + c0 k0
/// with K_j = k0 + a*j.
double durable_objective(double k0, std::span<const double> demand, const DurableCostModel& costs);

/// Minimiser of durable_objective over k0 >= 0.
///
/// Sorts the projected shortages ascending, scans for the pivot J at which the
/// derivative of the relaxed objective changes sign, and returns the weighted
/// mean
///   K0' = (sum_{j<J} w-_j Y_j + sum_{j>=J} w+_j Y_j - S) / (sum_{j<J} w-_j + sum_{j>=J} w+_j)
/// clamped at zero, where w± = omega theta± and S = sum omega_j c_j + c0.
/// Ties in Y keep their day order and the smallest qualifying J is used.
/// Throws DegenerateCosts if every omega_j theta±_j is zero.
StockpileResult optimal_initial_stockpile(std::span<const double> demand,
                                          const DurableCostModel& costs);

/// K_j = k0 + a*j for j = 1..m.
std::vector<double> supply_path(double k0, double production_rate, std::size_t days);

}  // namespace pandemic
