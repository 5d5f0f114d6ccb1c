#include "pandemic/stockpile_singleuse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

constexpr double kResidualTolerance = 1e-6;

void check_inputs(std::span<const double> demand, const SingleUseCostModel& costs) {
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

// W_j = sum_{t >= j} omega_t c_t: possession cost saved by releasing a unit on day j.
std::vector<double> release_credit(const SingleUseCostModel& costs) {
  const std::size_t m = costs.horizon();
  std::vector<double> credit(m, 0.0);
  double tail = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    tail += costs.weights[j] * costs.possession_cost[j];
    credit[j] = tail;
  }
  return credit;
}

// Per-day release as a function of the storage price lambda:
//   argmin_{k in [0, X]} h/2 (X - k)^2 - W k + lambda k.
// Days with h = 0 release all or nothing and are "flat" at lambda == W.
class ReleaseCurve {
 public:
  ReleaseCurve(std::span<const double> demand, const SingleUseCostModel& costs)
      : demand_(demand.begin(), demand.end()),
        curvature_(demand.size()),
        credit_(release_credit(costs)) {
    for (std::size_t j = 0; j < demand.size(); ++j) {
      curvature_[j] = costs.weights[j] * costs.shortage_cost[j];
    }
  }

  bool flat_at(std::size_t j, double price) const {
    return curvature_[j] == 0.0 && demand_[j] > 0.0 && price == credit_[j];
  }

  // Release on day j; flat days count as empty.
  double release(std::size_t j, double price) const {
    const double x = demand_[j];
    if (x == 0.0 || price <= credit_[j]) {
      return flat_at(j, price) ? 0.0 : x;
    }
    if (curvature_[j] == 0.0) return 0.0;
    return std::clamp(x - (price - credit_[j]) / curvature_[j], 0.0, x);
  }

  // Total release over [first, last]; `fill_flat` counts flat days as full.
  double total(std::size_t first, std::size_t last, double price, bool fill_flat) const {
    double sum = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      sum += (fill_flat && flat_at(j, price)) ? demand_[j] : release(j, price);
    }
    return sum;
  }

  // Smallest price at which the block releases no more than `supply`.
  double clearing_price(std::size_t first, std::size_t last, double supply) const {
    if (total(first, last, 0.0, true) <= supply) return 0.0;
    std::vector<double> kinks{0.0};
    for (std::size_t j = first; j <= last; ++j) {
      if (demand_[j] == 0.0) continue;
      kinks.push_back(credit_[j]);
      kinks.push_back(credit_[j] + curvature_[j] * demand_[j]);
    }
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

    // First kink whose low-side release is within supply; the last kink always
    // qualifies because every day releases nothing there.
    std::size_t lo = 0, hi = kinks.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (total(first, last, kinks[mid], false) <= supply) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    const double at_kink_hi = total(first, last, kinks[lo], true);
    if (at_kink_hi >= supply || lo == 0) return kinks[lo];
    // Release is affine strictly between neighbouring kinks.
    const double left = kinks[lo - 1];
    const double right = kinks[lo];
    const double release_left = total(first, last, left, false);
    const double drop = release_left - at_kink_hi;
    if (!(drop > 0.0)) return right;
    return std::clamp(left + (release_left - supply) / drop * (right - left), left, right);
  }

  // Releases at `price`; flat days share whatever is needed to reach `target`
  // (least-norm split), or nothing when the block is not binding.
  void assign(std::size_t first, std::size_t last, double price, double target, bool binding,
              std::vector<double>& out) const {
    double base = 0.0;
    std::vector<std::size_t> flat;
    for (std::size_t j = first; j <= last; ++j) {
      if (flat_at(j, price)) {
        flat.push_back(j);
        out[j] = 0.0;
      } else {
        out[j] = release(j, price);
        base += out[j];
      }
    }
    if (!binding || flat.empty()) return;
    double need = target - base;
    if (!(need > 0.0)) return;
    // Water-fill: equal release up to each day's demand.
    std::sort(flat.begin(), flat.end(), [&](std::size_t a, std::size_t b) {
      return demand_[a] < demand_[b];
    });
    std::size_t remaining = flat.size();
    for (std::size_t j : flat) {
      const double level = need / static_cast<double>(remaining);
      out[j] = std::min(demand_[j], level);
      need -= out[j];
      --remaining;
    }
  }

 private:
  std::vector<double> demand_;
  std::vector<double> curvature_;
  std::vector<double> credit_;
};

struct Block {
  std::size_t first;
  std::size_t last;
  double supply;  // production over the block, excluding initial stock
  double price = 0.0;
  double initial_stock = 0.0;  // only the block starting on day 1 buys any
};

void price_block(const ReleaseCurve& curve, double holding_cost, Block& block) {
  block.initial_stock = 0.0;
  block.price = curve.clearing_price(block.first, block.last, block.supply);
  if (block.first == 0 && block.price > holding_cost) {
    // Buying initial stock at S is cheaper than rationing further.
    block.price = holding_cost;
    block.initial_stock =
        std::max(0.0, curve.total(block.first, block.last, holding_cost, false) - block.supply);
  }
}

}  // namespace

std::vector<double> storage_trajectory(double k0, std::span<const double> distribution,
                                       double production_rate, std::span<const double> demand) {
  if (distribution.size() != demand.size()) {
    fail(Errc::LengthMismatch, "distribution has " + std::to_string(distribution.size()) +
                                   " days, demand has " + std::to_string(demand.size()));
  }
  std::vector<double> storage(demand.size() + 1);
  storage[0] = k0;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    const double returned = std::max(0.0, distribution[j] - demand[j]);
    storage[j + 1] = storage[j] + production_rate - distribution[j] + returned;
  }
  return storage;
}

double singleuse_objective(const DistributionSchedule& schedule, std::span<const double> demand,
                           const SingleUseCostModel& costs) {
  if (demand.size() != costs.horizon() || schedule.distribution.size() != demand.size()) {
    fail(Errc::LengthMismatch, "schedule, demand and cost model horizons differ");
  }
  const auto storage = storage_trajectory(schedule.initial_stockpile, schedule.distribution,
                                          costs.production_rate, demand);
  if (!schedule.storage.empty()) {
    if (schedule.storage.size() != storage.size()) {
      fail(Errc::InconsistentStorage, "storage has the wrong number of entries");
    }
    for (std::size_t j = 0; j < storage.size(); ++j) {
      const double tol = 1e-9 * std::max({1.0, std::abs(storage[j]), costs.production_rate});
      if (std::abs(schedule.storage[j] - storage[j]) > tol) {
        fail(Errc::InconsistentStorage,
             "storage on day " + std::to_string(j) + " does not follow the recursion");
      }
    }
  }
  double total = costs.initial_cost * schedule.initial_stockpile;
  for (std::size_t j = 0; j < demand.size(); ++j) {
    const double gap = demand[j] - schedule.distribution[j];
    const double imbalance = gap > 0.0 ? 0.5 * costs.shortage_cost[j] * gap * gap
                                       : 0.5 * costs.surplus_cost[j] * gap * gap;
    total += costs.weights[j] * (imbalance + costs.possession_cost[j] * storage[j + 1]);
  }
  return total;
}

double schedule_scale(std::span<const double> demand, const SingleUseCostModel& costs) {
  double scale = 1.0;
  for (std::size_t j = 0; j < demand.size() && j < costs.horizon(); ++j) {
    scale = std::max(scale, costs.weights[j] * costs.shortage_cost[j] * demand[j]);
  }
  return scale;
}

double schedule_kkt_residual(const DistributionSchedule& schedule, std::span<const double> demand,
                             const SingleUseCostModel& costs) {
  const std::size_t m = demand.size();
  if (schedule.distribution.size() != m || schedule.storage_price.size() != m ||
      costs.horizon() != m) {
    fail(Errc::LengthMismatch, "schedule, prices, demand and cost model horizons differ");
  }
  const auto credit = release_credit(costs);
  const auto& k = schedule.distribution;
  const auto& price = schedule.storage_price;
  const auto storage =
      storage_trajectory(schedule.initial_stockpile, k, costs.production_rate, demand);

  double quantity_scale = std::max(1.0, costs.production_rate);
  for (double x : demand) quantity_scale = std::max(quantity_scale, x);
  const double near = 1e-9 * quantity_scale;

  double residual = 0.0;
  // Primal feasibility.
  residual = std::max(residual, -schedule.initial_stockpile);
  for (std::size_t j = 0; j < m; ++j) {
    residual = std::max({residual, -k[j], k[j] - demand[j], -storage[j + 1]});
  }
  // Stationarity in k_j, with box multipliers absorbing the sign at a bound.
  for (std::size_t j = 0; j < m; ++j) {
    if (demand[j] == 0.0) continue;
    const double h = costs.weights[j] * costs.shortage_cost[j];
    const double g = h * (k[j] - demand[j]) - credit[j] + price[j];
    double r = std::abs(g);
    if (k[j] <= near) r = std::min(r, std::max(0.0, -g));
    if (demand[j] - k[j] <= near) r = std::min(r, std::max(0.0, g));
    residual = std::max(residual, r);
  }
  // Stationarity in K0.
  const double reduced = costs.marginal_holding_cost() - (m > 0 ? price[0] : 0.0);
  residual = std::max(residual, schedule.initial_stockpile > near ? std::abs(reduced)
                                                                   : std::max(0.0, -reduced));
  // Storage multipliers nu_j = price_j - price_{j+1} must be >= 0 and vanish
  // unless storage is empty.
  for (std::size_t j = 0; j < m; ++j) {
    const double nu = price[j] - (j + 1 < m ? price[j + 1] : 0.0);
    residual = std::max(residual, -nu);
    if (storage[j + 1] > near) residual = std::max(residual, nu);
  }
  return residual;
}

DistributionSchedule optimize_schedule(std::span<const double> demand,
                                       const SingleUseCostModel& costs) {
  check_inputs(demand, costs);
  const std::size_t m = demand.size();
  const double rate = costs.production_rate;
  const double holding = costs.marginal_holding_cost();
  const ReleaseCurve curve(demand, costs);

  std::vector<Block> blocks;
  blocks.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    blocks.push_back(Block{j, j, rate});
    price_block(curve, holding, blocks.back());
    // Storage only flows forward, so prices may not rise over time. Equal
    // prices need no merge: the earlier block already balances on its own.
    while (blocks.size() >= 2 && blocks.back().price > blocks[blocks.size() - 2].price) {
      Block merged = blocks[blocks.size() - 2];
      merged.last = blocks.back().last;
      merged.supply += blocks.back().supply;
      blocks.pop_back();
      blocks.back() = merged;
      price_block(curve, holding, blocks.back());
    }
  }

  DistributionSchedule schedule;
  schedule.distribution.assign(m, 0.0);
  schedule.storage_price.assign(m, 0.0);
  for (const auto& block : blocks) {
    const double available = block.supply + block.initial_stock;
    const bool binding = block.price > 0.0;
    curve.assign(block.first, block.last, block.price, available, binding, schedule.distribution);
    for (std::size_t j = block.first; j <= block.last; ++j) schedule.storage_price[j] = block.price;
  }
  schedule.initial_stockpile = blocks.empty() ? 0.0 : blocks.front().initial_stock;

  // Keep storage exactly non-negative: trim any round-off overshoot from the
  // day that empties the store.
  schedule.storage.assign(m + 1, 0.0);
  schedule.storage[0] = schedule.initial_stockpile;
  for (std::size_t j = 0; j < m; ++j) {
    double& k = schedule.distribution[j];
    k = std::clamp(k, 0.0, demand[j]);
    double next = schedule.storage[j] + rate - k;
    if (next < 0.0) {
      k = schedule.storage[j] + rate;
      next = 0.0;
    }
    schedule.storage[j + 1] = next;
  }

  schedule.objective = singleuse_objective(schedule, demand, costs);
  schedule.kkt_residual = schedule_kkt_residual(schedule, demand, costs);
  const double tolerance = kResidualTolerance * schedule_scale(demand, costs);
  if (!(schedule.kkt_residual <= tolerance)) {
    fail(Errc::SolverNotConverged, "schedule KKT residual " + std::to_string(schedule.kkt_residual) +
                                       " exceeds tolerance " + std::to_string(tolerance));
  }
  return schedule;
}

}  // namespace pandemic
