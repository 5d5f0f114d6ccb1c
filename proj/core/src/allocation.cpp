#include "pandemic/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

void check_length(const std::vector<double>& values, std::size_t n, const char* name) {
  if (values.size() != n) {
    fail(Errc::LengthMismatch, std::string("period ") + name + " has " +
                                   std::to_string(values.size()) + " regions, expected " +
                                   std::to_string(n));
  }
}

struct Candidate {
  std::size_t served = 0;  // I
  double shortfall = 0.0;  // sum_{r<=I} X[r] - supply
  double harmonic_total = 0.0;  // sum_{r<=I} 1/(omega theta+)
  double violation = 0.0;  // 0 iff the frugality test passes
};

// Frugality test for serving the top `served` ranked regions.
Candidate frugality_test(const std::vector<std::size_t>& ranked, const std::vector<double>& demand,
                         const std::vector<double>& inverse_cost, std::size_t served,
                         double supply) {
  Candidate c;
  c.served = served;
  double served_demand = 0.0;
  for (std::size_t r = 0; r < served; ++r) {
    served_demand += demand[ranked[r]];
    c.harmonic_total += inverse_cost[ranked[r]];
  }
  c.shortfall = served_demand - supply;

  // (i) supply only just covers the served regions.
  double violation = std::max(0.0, -c.shortfall);
  bool passes = c.shortfall >= 0.0;
  // (ii) holistic rule non-negative on served regions, negative on the rest.
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const std::size_t i = ranked[r];
    const double tentative = demand[i] - inverse_cost[i] / c.harmonic_total * c.shortfall;
    if (r < served) {
      passes = passes && tentative >= 0.0;
      violation = std::max(violation, -tentative);
    } else {
      passes = passes && tentative < 0.0;
      violation = std::max(violation, tentative);
    }
  }
  // Boundary cases (tentative == 0 on an unserved region) fail with zero
  // measured violation; keep them distinguishable from a pass.
  c.violation = passes ? 0.0 : std::max(violation, std::numeric_limits<double>::min());
  return c;
}

std::vector<double> serve(const std::vector<std::size_t>& ranked, const std::vector<double>& demand,
                          const std::vector<double>& inverse_cost, const Candidate& c,
                          std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < c.served; ++r) {
    const std::size_t i = ranked[r];
    out[i] = std::clamp(demand[i] - inverse_cost[i] / c.harmonic_total * c.shortfall, 0.0, demand[i]);
  }
  return out;
}

// Pushes the round-off gap between sum K and the supply onto one region that
// already holds stock, so unserved regions stay at exactly zero.
void close_budget(std::vector<double>& allocated, const std::vector<double>& demand, double supply,
                  bool respect_demand) {
  double total = 0.0;
  for (double k : allocated) total += k;
  const double drift = supply - total;
  if (drift == 0.0 || allocated.empty()) return;
  std::size_t target = allocated.size();
  double best = 0.0;
  for (std::size_t i = 0; i < allocated.size(); ++i) {
    if (allocated[i] <= 0.0) continue;
    const double room = drift > 0.0 ? (respect_demand ? demand[i] - allocated[i] : allocated[i] + 1.0)
                                     : allocated[i];
    if (room > best) {
      best = room;
      target = i;
    }
  }
  if (target == allocated.size()) return;
  double adjusted = allocated[target] + drift;
  adjusted = std::max(adjusted, 0.0);
  if (respect_demand) adjusted = std::min(adjusted, demand[target]);
  allocated[target] = adjusted;
}

}  // namespace

std::string_view to_string(AllocationBranch branch) noexcept {
  return branch == AllocationBranch::Surplus ? "surplus" : "shortage";
}

void RegionalPeriodDemand::validate() const {
  const std::size_t n = demand.size();
  if (n == 0) fail(Errc::InvalidArgument, "period needs at least one region");
  check_length(weights, n, "weights");
  check_length(shortage_cost, n, "shortage_cost");
  check_length(surplus_cost, n, "surplus_cost");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(demand[i]) || demand[i] < 0.0) {
      fail(Errc::ValidationError, "regional demand must be finite and >= 0");
    }
    const double plus = weights[i] * shortage_cost[i];
    const double minus = weights[i] * surplus_cost[i];
    if (!(plus > 0.0) || !(minus > 0.0) || !std::isfinite(plus) || !std::isfinite(minus)) {
      fail(Errc::ValidationError,
           "omega * theta must be finite and > 0 for region " + std::to_string(i));
    }
  }
}

std::vector<double> harmonic_weights(std::span<const double> weights, std::span<const double> costs,
                                     std::span<const std::size_t> subset) {
  if (subset.empty()) fail(Errc::EmptySubset, "harmonic weights need a non-empty subset");
  if (weights.size() != costs.size()) fail(Errc::LengthMismatch, "weights and costs differ in length");
  std::vector<double> out(weights.size(), 0.0);
  double total = 0.0;
  for (std::size_t i : subset) {
    if (i >= weights.size()) fail(Errc::InvalidArgument, "subset index out of range");
    const double product = weights[i] * costs[i];
    if (!(product > 0.0)) fail(Errc::InvalidArgument, "omega * theta must be > 0 on the subset");
    out[i] = 1.0 / product;
    total += out[i];
  }
  for (std::size_t i : subset) out[i] /= total;
  return out;
}

PeriodAllocation allocate_period(const RegionalPeriodDemand& period, double supply) {
  period.validate();
  if (!std::isfinite(supply) || supply < 0.0) {
    fail(Errc::InvalidArgument, "supply must be finite and >= 0");
  }
  const std::size_t n = period.regions();
  const double total_demand = std::accumulate(period.demand.begin(), period.demand.end(), 0.0);

  PeriodAllocation result;
  if (supply > total_demand) {
    result.branch = AllocationBranch::Surplus;
    std::vector<std::size_t> everyone(n);
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    result.harmonic_weights = harmonic_weights(period.weights, period.surplus_cost, everyone);
    const double excess = supply - total_demand;
    result.allocated.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.allocated[i] = period.demand[i] + result.harmonic_weights[i] * excess;
      result.below_demand_in_surplus =
          result.below_demand_in_surplus || result.allocated[i] < period.demand[i];
    }
    close_budget(result.allocated, period.demand, supply, false);
    return result;
  }

  result.branch = AllocationBranch::Shortage;
  std::vector<std::size_t> ranked;
  std::vector<double> inverse_cost(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    inverse_cost[i] = 1.0 / (period.weights[i] * period.shortage_cost[i]);
    if (period.demand[i] > 0.0) ranked.push_back(i);
  }
  if (ranked.empty()) {
    // No demand anywhere, hence no supply either.
    result.allocated.assign(n, 0.0);
    result.harmonic_weights.assign(n, 0.0);
    result.frugality_index = 0;
    return result;
  }
  // Marginal shortage cost at zero allocation, omega theta+ X, ranks the regions.
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return period.demand[a] / inverse_cost[a] > period.demand[b] / inverse_cost[b];
  });

  std::vector<Candidate> candidates;
  for (std::size_t served = 1; served <= ranked.size(); ++served) {
    candidates.push_back(frugality_test(ranked, period.demand, inverse_cost, served, supply));
  }
  std::vector<const Candidate*> passing;
  for (const auto& c : candidates) {
    if (c.violation == 0.0) passing.push_back(&c);
  }

  const double scale = allocation_scale(period, supply);
  const Candidate* chosen = nullptr;
  if (passing.size() == 1) {
    chosen = passing.front();
  } else if (passing.empty()) {
    // Only round-off can defeat the test; accept the nearest miss if it is tiny.
    chosen = &*std::min_element(candidates.begin(), candidates.end(),
                                [](const Candidate& a, const Candidate& b) {
                                  return a.violation < b.violation;
                                });
    if (chosen->violation > 1e-12 * scale) {
      fail(Errc::NoFrugalIndex, "no number of served regions passes the frugality test");
    }
  } else {
    // Several passes can only come from ties; they must describe the same plan.
    const auto reference = serve(ranked, period.demand, inverse_cost, *passing.front(), n);
    for (const Candidate* c : passing) {
      const auto other = serve(ranked, period.demand, inverse_cost, *c, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(other[i] - reference[i]) > 1e-9 * scale) {
          fail(Errc::AmbiguousFrugalIndex, "frugality test passes for several served counts");
        }
      }
    }
    chosen = passing.front();
  }

  result.frugality_index = chosen->served;
  result.allocated = serve(ranked, period.demand, inverse_cost, *chosen, n);
  const std::vector<std::size_t> served(ranked.begin(), ranked.begin() + chosen->served);
  result.harmonic_weights = harmonic_weights(period.weights, period.shortage_cost, served);
  close_budget(result.allocated, period.demand, supply, true);
  return result;
}

double allocation_scale(const RegionalPeriodDemand& period, double supply) {
  double scale = std::max(1.0, supply);
  for (std::size_t i = 0; i < period.regions(); ++i) {
    const double theta = std::max(period.shortage_cost[i], period.surplus_cost[i]);
    scale = std::max(scale, period.weights[i] * theta * period.demand[i]);
  }
  return scale;
}

double allocation_kkt_residual(const RegionalPeriodDemand& period, double supply,
                               const PeriodAllocation& allocation) {
  const std::size_t n = period.regions();
  const auto& k = allocation.allocated;
  if (k.size() != n) fail(Errc::LengthMismatch, "allocation and period differ in region count");

  std::vector<double> gradient(n);
  double residual = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = k[i] - period.demand[i];
    const double theta = gap < 0.0 ? period.shortage_cost[i] : period.surplus_cost[i];
    gradient[i] = period.weights[i] * theta * gap;
    residual = std::max(residual, -k[i]);
    total += k[i];
  }
  residual = std::max(residual, std::abs(total - supply));

  // Budget multiplier: every region holding stock must see the same marginal
  // cost -gradient; take the midpoint of their range.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] > 0.0) {
      lo = std::min(lo, -gradient[i]);
      hi = std::max(hi, -gradient[i]);
    }
  }
  double multiplier;
  if (lo <= hi) {
    multiplier = 0.5 * (lo + hi);
    residual = std::max(residual, 0.5 * (hi - lo));
  } else {
    multiplier = -std::numeric_limits<double>::infinity();
    for (double g : gradient) multiplier = std::max(multiplier, -g);
  }
  // Regions at zero need a non-negative bound multiplier gradient + mu.
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] <= 0.0) residual = std::max(residual, -(gradient[i] + multiplier));
  }
  return residual;
}

std::vector<std::vector<double>> remaining_demand_weights(std::span<const DemandSeries> demand) {
  const std::size_t n = demand.size();
  if (n == 0) return {};
  const std::size_t m = demand.front().horizon();
  std::vector<std::vector<double>> remaining(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (demand[i].horizon() != m) fail(Errc::LengthMismatch, "regional series differ in length");
    double tail = 0.0;
    for (std::size_t j = m; j-- > 0;) {
      tail += demand[i].values[j];
      remaining[i][j] = tail;
    }
  }
  std::vector<std::vector<double>> weights(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += remaining[i][j];
    for (std::size_t i = 0; i < n; ++i) {
      weights[i][j] = total > 0.0 ? std::max(remaining[i][j] / total, 1e-12)
                                  : 1.0 / static_cast<double>(n);
    }
  }
  return weights;
}

RegionalCosts uniform_regional_costs(std::size_t regions, std::size_t days, double weight,
                                     double shortage_cost, double surplus_cost) {
  return RegionalCosts{
      std::vector<std::vector<double>>(regions, std::vector<double>(days, weight)),
      std::vector<std::vector<double>>(regions, std::vector<double>(days, shortage_cost)),
      std::vector<std::vector<double>>(regions, std::vector<double>(days, surplus_cost)),
  };
}

AllocationPlan allocate_horizon(std::span<const DemandSeries> demand, const RegionalCosts& costs,
                                std::span<const double> supply, unsigned threads) {
  const std::size_t n = demand.size();
  if (n == 0) fail(Errc::InvalidArgument, "allocation needs at least one region");
  const std::size_t m = supply.size();
  auto check_grid = [&](const std::vector<std::vector<double>>& grid, const char* name) {
    if (grid.size() != n) fail(Errc::LengthMismatch, std::string(name) + " region count mismatch");
    for (const auto& row : grid) {
      if (row.size() != m) fail(Errc::LengthMismatch, std::string(name) + " day count mismatch");
    }
  };
  for (const auto& series : demand) {
    if (series.horizon() != m) {
      fail(Errc::LengthMismatch, "demand for '" + series.region + "' does not match the supply horizon");
    }
  }
  check_grid(costs.weights, "weights");
  check_grid(costs.shortage_cost, "shortage_cost");
  check_grid(costs.surplus_cost, "surplus_cost");

  AllocationPlan plan;
  for (const auto& series : demand) plan.regions.push_back(series.region);
  plan.supply.assign(supply.begin(), supply.end());
  plan.periods.resize(m);
  plan.kkt_residuals.resize(m);
  std::vector<std::exception_ptr> errors(m);

  auto solve_days = [&](std::size_t begin, std::size_t end) {
    RegionalPeriodDemand period;
    period.demand.resize(n);
    period.weights.resize(n);
    period.shortage_cost.resize(n);
    period.surplus_cost.resize(n);
    for (std::size_t j = begin; j < end; ++j) {
      try {
        for (std::size_t i = 0; i < n; ++i) {
          period.demand[i] = demand[i].values[j];
          period.weights[i] = costs.weights[i][j];
          period.shortage_cost[i] = costs.shortage_cost[i][j];
          period.surplus_cost[i] = costs.surplus_cost[i][j];
        }
        plan.periods[j] = allocate_period(period, supply[j]);
        plan.kkt_residuals[j] = allocation_kkt_residual(period, supply[j], plan.periods[j]);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(m, 1));
  if (workers == 1) {
    solve_days(0, m);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (m + workers - 1) / workers;
    for (std::size_t begin = 0; begin < m; begin += chunk) {
      pool.emplace_back(solve_days, begin, std::min(m, begin + chunk));
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const Error& e) {
      fail(e.code(), "allocation day " + std::to_string(j + 1) + ": " + e.what());
    }
  }
  return plan;
}

}  // namespace pandemic
