#include "pandemic/cost_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

void check_sequence(const std::vector<double>& values, std::size_t m, const char* name) {
  if (values.size() != m) {
    fail(Errc::ValidationError, std::string("cost model ") + name + " has " +
                                    std::to_string(values.size()) + " entries, expected " +
                                    std::to_string(m));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(values[j]) || values[j] < 0.0) {
      fail(Errc::ValidationError, std::string("cost model ") + name + " on day " +
                                      std::to_string(j + 1) + " must be finite and >= 0");
    }
  }
}

}  // namespace

CostModel CostModel::uniform(std::size_t days, double production_rate, double weight,
                             double shortage_cost, double surplus_cost, double possession_cost,
                             double initial_cost) {
  return CostModel{production_rate,
                   std::vector<double>(days, weight),
                   std::vector<double>(days, shortage_cost),
                   std::vector<double>(days, surplus_cost),
                   std::vector<double>(days, possession_cost),
                   initial_cost};
}

void CostModel::validate() const {
  const std::size_t m = horizon();
  if (m == 0) fail(Errc::ValidationError, "cost model horizon must be >= 1 day");
  check_sequence(weights, m, "weights");
  check_sequence(shortage_cost, m, "shortage_cost");
  check_sequence(surplus_cost, m, "surplus_cost");
  check_sequence(possession_cost, m, "possession_cost");
  if (!std::isfinite(production_rate) || production_rate < 0.0) {
    fail(Errc::ValidationError, "cost model production_rate must be finite and >= 0");
  }
  if (!std::isfinite(initial_cost) || initial_cost < 0.0) {
    fail(Errc::ValidationError, "cost model initial_cost must be finite and >= 0");
  }
  bool any_imbalance_cost = false;
  for (std::size_t j = 0; j < m; ++j) {
    any_imbalance_cost = any_imbalance_cost || shortage_cost[j] > 0.0 || surplus_cost[j] > 0.0;
  }
  if (!any_imbalance_cost) {
    fail(Errc::ValidationError, "cost model needs a positive shortage or surplus cost on some day");
  }
}

double CostModel::marginal_holding_cost() const noexcept {
  double s = initial_cost;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * possession_cost[j];
  return s;
}

std::vector<double> demand_proportional_weights(std::span<const double> demand) {
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (demand.empty() || !(total > 0.0)) return std::vector<double>(demand.size(), 1.0);
  const double mean = total / static_cast<double>(demand.size());
  std::vector<double> out(demand.size());
  for (std::size_t j = 0; j < demand.size(); ++j) out[j] = demand[j] / mean;
  return out;
}

}  // namespace pandemic
