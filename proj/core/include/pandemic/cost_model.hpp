#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pandemic {

/// Day-indexed costs of a centralised stockpile over an m-day horizon. Every
/// sequence holds one entry per day, index 0 being day 1.
///
/// The same structure parameterises both resource kinds: for durable
/// resources `possession_cost` is charged on the whole available stock
/// K0 + a*j, for single-use resources on the central storage K_j.
struct CostModel {
  double production_rate = 0.0;  // a, units/day
  std::vector<double> weights;  // omega_j
  std::vector<double> shortage_cost;  // theta+_j per squared unit
  std::vector<double> surplus_cost;  // theta-_j per squared unit
  std::vector<double> possession_cost;  // c_j per unit per day
  double initial_cost = 0.0;  // c0 per unit

  std::size_t horizon() const noexcept { return weights.size(); }

  /// Builds a model with the same scalar value on every day.
  static CostModel uniform(std::size_t days, double production_rate, double weight,
                           double shortage_cost, double surplus_cost, double possession_cost,
                           double initial_cost);

  /// Throws ValidationError if sequence lengths differ, any entry is negative
  /// or non-finite, or no day has a positive shortage or surplus cost.
  void validate() const;

  /// S = sum_j omega_j c_j + c0: marginal possession cost of one unit of
  /// initial stockpile.
  double marginal_holding_cost() const noexcept;
};

using DurableCostModel = CostModel;
using SingleUseCostModel = CostModel;

/// omega_j = X_j / mean(X). Falls back to omega_j = 1 when the series is
/// identically zero.
std::vector<double> demand_proportional_weights(std::span<const double> demand);

}  // namespace pandemic
