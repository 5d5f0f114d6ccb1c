#include "pandemic/stockpile_durable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

void check_demand(std::span<const double> demand, const CostModel& costs) {
  costs.validate();
  if (demand.size() != costs.horizon()) {
    fail(Errc::LengthMismatch, "demand has " + std::to_string(demand.size()) +
                                   " days but the cost model covers " +
                                   std::to_string(costs.horizon()));
  }
  for (double x : demand) {
    if (!std::isfinite(x) || x < 0.0) fail(Errc::ValidationError, "demand must be finite and >= 0");
  }
}

struct RankedShortage {
  double shortage;
  double surplus_weight;  // omega theta-
  double shortage_weight;  // omega theta+
};

}  // namespace

std::vector<double> projected_shortage(std::span<const double> demand, double production_rate) {
  std::vector<double> y(demand.size());
  for (std::size_t j = 0; j < demand.size(); ++j) {
    y[j] = demand[j] - production_rate * static_cast<double>(j + 1);
  }
  return y;
}

double durable_objective(double k0, std::span<const double> demand, const DurableCostModel& costs) {
  double total = costs.initial_cost * k0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    const double available = k0 + costs.production_rate * static_cast<double>(j + 1);
    const double gap = demand[j] - available;
    const double imbalance = gap > 0.0 ? 0.5 * costs.shortage_cost[j] * gap * gap
                                       : 0.5 * costs.surplus_cost[j] * gap * gap;
    total += costs.weights[j] * (imbalance + costs.possession_cost[j] * available);
  }
  return total;
}

StockpileResult optimal_initial_stockpile(std::span<const double> demand,
                                          const DurableCostModel& costs) {
  check_demand(demand, costs);
  const std::size_t m = demand.size();
  const std::vector<double> y = projected_shortage(demand, costs.production_rate);

  std::vector<RankedShortage> ranked(m);
  bool any_weight = false;
  for (std::size_t j = 0; j < m; ++j) {
    ranked[j] = {y[j], costs.weights[j] * costs.surplus_cost[j],
                 costs.weights[j] * costs.shortage_cost[j]};
    any_weight = any_weight || ranked[j].surplus_weight > 0.0 || ranked[j].shortage_weight > 0.0;
  }
  if (!any_weight) {
    fail(Errc::DegenerateCosts, "every omega_j * theta_j is zero; the objective has no minimiser");
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedShortage& a, const RankedShortage& b) { return a.shortage < b.shortage; });

  const double holding = costs.marginal_holding_cost();

  // below_*: days ranked before J (surplus side), above_*: ranks J..m (shortage side).
  double below_weight = 0.0, below_moment = 0.0;
  double above_weight = 0.0, above_moment = 0.0;
  for (const auto& r : ranked) {
    above_weight += r.shortage_weight;
    above_moment += r.shortage_weight * r.shortage;
  }

  std::size_t pivot = 0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double yj = ranked[rank].shortage;
    // -F'(Y_[J]) + S with the partition at J; non-increasing in J.
    const double slope = (below_moment - yj * below_weight) + (above_moment - yj * above_weight);
    if (slope <= holding) {
      pivot = rank + 1;
      break;
    }
    below_weight += ranked[rank].surplus_weight;
    below_moment += ranked[rank].surplus_weight * yj;
    above_weight -= ranked[rank].shortage_weight;
    above_moment -= ranked[rank].shortage_weight * yj;
  }
  if (pivot == 0) {
    // At J = m the slope is <= 0 <= S, so only non-finite input gets here.
    fail(Errc::DegenerateCosts, "no pivot satisfies the optimality bracket");
  }

  const double denominator = below_weight + above_weight;
  StockpileResult result;
  result.pivot = pivot;
  if (denominator > 0.0) {
    result.unclamped = (below_moment + above_moment - holding) / denominator;
  } else {
    // Only surplus costs below the pivot and none above it: the relaxed
    // objective is non-decreasing, so the constrained optimum sits at zero.
    result.unclamped = -std::numeric_limits<double>::infinity();
  }
  result.initial_stockpile = std::max(result.unclamped, 0.0);
  result.objective = durable_objective(result.initial_stockpile, demand, costs);
  return result;
}

std::vector<double> supply_path(double k0, double production_rate, std::size_t days) {
  if (!(k0 >= 0.0)) fail(Errc::InvalidArgument, "supply_path: k0 must be >= 0");
  std::vector<double> supply(days);
  for (std::size_t j = 0; j < days; ++j) {
    supply[j] = k0 + production_rate * static_cast<double>(j + 1);
  }
  return supply;
}

}  // namespace pandemic
