// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pandemic/allocation.hpp"
#include "pandemic/epidemic.hpp"
#include "pandemic/error.hpp"
#include "pandemic/export.hpp"
#include "pandemic/oracle.hpp"
#include "pandemic/pipeline.hpp"
#include "pandemic/stockpile_durable.hpp"
#include "pandemic/stockpile_singleuse.hpp"

namespace {

using namespace pandemic;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kConservationTol = 1e-9;
constexpr double kConservationSeconds = 10;
constexpr double kR0RelTol = 1e-12;
constexpr double kDurableGridStep = 1e-3;
constexpr double kDurableSeconds = 30;
constexpr double kScheduleKktTol = 1e-6;  // times schedule_scale
constexpr double kScheduleObjectiveRelTol = 1e-6;
constexpr double kScheduleDemandTol = 1e-6;
constexpr double kSingleUseSeconds = 60;
constexpr double kBudgetTol = 1e-9;  // times allocation_scale
constexpr double kOracleComponentTol = 1e-4;
constexpr double kNearMissTol = 1e-12;  // times allocation_scale, as in the solver
constexpr double kAllocationSeconds = 60;
constexpr double kEarlyShare = 0.90;
constexpr double kLateShare = 0.50;
constexpr int kPeakHalfWidth = 3;  // peak week: peak day +-3

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string format(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof buffer, pattern, args);
  va_end(args);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EpidemicParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EpidemicParams p;
  p.population = std::pow(10.0, 3.0 + 4.0 * u(rng));
  p.beta1 = (0.1 + 0.8 * u(rng)) / p.population;
  p.beta2 = 0.2 * u(rng) / p.population;
  p.beta3 = 0.1 * u(rng) / p.population;
  p.gamma = 0.05 + 0.45 * u(rng);
  p.delta1 = 0.05 + 0.3 * u(rng);
  p.delta2 = 0.02 + 0.2 * u(rng);
  p.delta3 = 0.02 + 0.2 * u(rng);
  p.p1 = 0.1 * u(rng);
  p.p2 = 0.1 * u(rng);
  p.mu = 0.1 * u(rng);
  return p;
}

Outcome conservation() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const auto p = random_params(rng);
    CompartmentState s;
    s.E = std::floor(p.population * 0.01 * u(rng));
    s.I1 = std::floor(p.population * 0.01 * u(rng)) + 1;
    s.S = p.population - s.E - s.I1;
    const auto t = simulate(s, p, 200);
    for (const auto& state : t.states()) {
      worst = std::max(worst, std::abs(state.total() - p.population) / p.population);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= kConservationTol && elapsed < kConservationSeconds,
          format("1000 draws x 200 days, worst |sum-N|/N %.2e (limit %.0e), %.2f s", worst,
                 kConservationTol, elapsed)};
}

Outcome reproduction_number() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const auto p = random_params(rng);
    // Expanded by hand: N b1/(p1+d1) + N p1 b2/((p1+d1)(p2+d2)) + N p1 p2 b3/((p1+d1)(p2+d2)(mu+d3)).
    const double a = p.p1 + p.delta1;
    const double b = p.p2 + p.delta2;
    const double c = p.mu + p.delta3;
    const double expected = p.population * p.beta1 / a + p.population * p.p1 * p.beta2 / (a * b) +
                            p.population * p.p1 * p.p2 * p.beta3 / (a * b * c);
    worst = std::max(worst, std::abs(basic_reproduction_number(p) - expected) / expected);
  }
  auto p = random_params(rng);
  p.p1 = 0.0;
  const bool collapse = basic_reproduction_number(p) == p.population * p.beta1 / p.delta1;
  return {worst <= kR0RelTol && collapse,
          format("100 sets, worst relative error %.2e (limit %.0e); p1=0 collapse %s", worst,
                 kR0RelTol, collapse ? "exact" : "inexact")};
}

Outcome durable_optimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int perturbation_failures = 0;
  int grid_failures = 0;
  double worst_grid = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + trial % 30;
    std::vector<double> x(m);
    for (double& v : x) v = 20 * u(rng);
    CostModel c = CostModel::uniform(m, 2 * u(rng), 1, 1, 1, 0.05 * u(rng), u(rng));
    for (std::size_t j = 0; j < m; ++j) {
      c.weights[j] = 0.05 + u(rng);
      c.shortage_cost[j] = 0.1 + 2 * u(rng);
      c.surplus_cost[j] = 0.1 + 2 * u(rng);
    }
    const auto r = optimal_initial_stockpile(x, c);
    const double k0 = r.initial_stockpile;
    const double base = durable_objective(k0, x, c);
    const double slack = 1e-12 * std::max(1.0, std::abs(base));
    for (double eps : {1e-6, 1e-3}) {
      const double step = eps * std::max(1.0, k0);
      if (durable_objective(k0 + step, x, c) + slack < base) ++perturbation_failures;
      if (k0 >= step && durable_objective(k0 - step, x, c) + slack < base) ++perturbation_failures;
    }
    double hi = 1.0;
    for (double y : projected_shortage(x, c.production_rate)) hi = std::max(hi, y + 1.0);
    const double grid = oracle::grid_search_k0(x, c, 0.0, hi, kDurableGridStep);
    worst_grid = std::max(worst_grid, std::abs(grid - k0));
    if (std::abs(grid - k0) > 2 * kDurableGridStep) ++grid_failures;
  }
  const double elapsed = seconds_since(start);
  return {perturbation_failures == 0 && grid_failures == 0 && elapsed < kDurableSeconds,
          format("1000 instances, %d perturbation wins, worst |K0-grid| %.2e (limit %.0e), %.2f s",
                 perturbation_failures, worst_grid, 2 * kDurableGridStep, elapsed)};
}

Outcome asymmetric_costs_raise_stock(const Scenario& bundled) {
  Scenario s = bundled;
  if (!s.durable) return {false, "bundled scenario has no durable resource"};
  s.singleuse.reset();
  PipelineOptions o;
  o.stop_after = PipelineStage::Stockpile;
  s.durable->shortage_cost = {1000};
  s.durable->surplus_cost = {20};
  const double asymmetric = run_pipeline(s, o).resources.at(0).initial_stockpile();
  s.durable->surplus_cost = {1000};
  const double symmetric = run_pipeline(s, o).resources.at(0).initial_stockpile();
  return {asymmetric > symmetric,
          format("K0*(1000/20) = %.6g, K0*(1000/1000) = %.6g", asymmetric, symmetric)};
}

Outcome singleuse_solver() {
  const auto start = Clock::now();
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto demand = [&](std::size_t m) {
    std::vector<double> x(m);
    for (double& v : x) v = u(rng) < 0.15 ? 0.0 : 20 * u(rng);
    return x;
  };
  auto costs = [&](std::size_t m) {
    CostModel c = CostModel::uniform(m, 5 * u(rng), 1, 1, 1, 0, u(rng));
    for (std::size_t j = 0; j < m; ++j) {
      c.weights[j] = 0.2 + u(rng);
      c.shortage_cost[j] = 0.2 + 2 * u(rng);
      c.possession_cost[j] = 0.3 * u(rng);
    }
    return c;
  };

  int kkt_failures = 0;
  int objective_failures = 0;
  int oracle_errors = 0;
  double worst_kkt = 0.0;
  double worst_gap = 0.0;
  auto certify = [&](const std::vector<double>& x, const CostModel& c) {
    const auto s = optimize_schedule(x, c);
    const double ratio = s.kkt_residual / schedule_scale(x, c);
    worst_kkt = std::max(worst_kkt, ratio);
    if (ratio > kScheduleKktTol) ++kkt_failures;
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + trial % 6;
    const auto x = demand(m);
    const auto c = costs(m);
    const auto fast = certify(x, c);
    try {
      const auto slow = oracle::brute_force_schedule(x, c);
      const double gap =
          std::abs(fast.objective - slow.objective) / std::max(1.0, std::abs(slow.objective));
      worst_gap = std::max(worst_gap, gap);
      if (gap > kScheduleObjectiveRelTol) ++objective_failures;
    } catch (const Error&) {
      ++oracle_errors;
    }
  }
  // Longer horizons are certified by the residual alone.
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 7 + trial % 120;
    certify(demand(m), costs(m));
  }
  double worst_track = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial;
    const auto x = demand(m);
    const double peak = *std::max_element(x.begin(), x.end());
    CostModel c = costs(m);
    c.production_rate = peak + 1.0;
    std::fill(c.possession_cost.begin(), c.possession_cost.end(), 0.0);
    c.initial_cost = 0.0;
    const auto s = certify(x, c);
    for (std::size_t j = 0; j < m; ++j) {
      worst_track = std::max(worst_track, std::abs(s.distribution[j] - x[j]));
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = kkt_failures == 0 && objective_failures == 0 && oracle_errors == 0 &&
                  worst_track <= kScheduleDemandTol && elapsed < kSingleUseSeconds;
  return {ok, format("worst KKT/scale %.2e (limit %.0e), worst oracle gap %.2e over 200 (limit %.0e, "
                     "%d oracle errors), worst |k-X| at zero possession %.2e, %.2f s",
                     worst_kkt, kScheduleKktTol, worst_gap, kScheduleObjectiveRelTol, oracle_errors,
                     worst_track, elapsed)};
}

// Independent frugality test over regions with positive demand, ranked by
// omega theta+ X. Returns the violation of each candidate I (0 means pass).
std::vector<double> frugality_violations(const RegionalPeriodDemand& p, double supply) {
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < p.regions(); ++i) {
    if (p.demand[i] > 0) ranked.push_back(i);
  }
  auto key = [&](std::size_t i) { return p.weights[i] * p.shortage_cost[i] * p.demand[i]; };
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  std::vector<double> violations;
  for (std::size_t served = 1; served <= ranked.size(); ++served) {
    double total = 0.0;
    double inverse = 0.0;
    for (std::size_t r = 0; r < served; ++r) {
      total += p.demand[ranked[r]];
      inverse += 1.0 / (p.weights[ranked[r]] * p.shortage_cost[ranked[r]]);
    }
    const double shortfall = total - supply;
    double v = std::max(0.0, -shortfall);
    bool pass = shortfall >= 0.0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      const std::size_t i = ranked[r];
      const double b = 1.0 / (p.weights[i] * p.shortage_cost[i]) / inverse;
      const double k = p.demand[i] - b * shortfall;
      if (r < served) {
        pass = pass && k >= 0.0;
        v = std::max(v, -k);
      } else {
        pass = pass && k < 0.0;
        v = std::max(v, std::max(k, std::numeric_limits<double>::min()));
      }
    }
    violations.push_back(pass ? 0.0 : std::max(v, std::numeric_limits<double>::min()));
  }
  return violations;
}

Outcome allocation_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int budget = 0, negative = 0, branch = 0, frugality = 0, oracle_failures = 0, oracle_errors = 0;
  int near_misses = 0, ties = 0, compared = 0;
  double worst_component = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    RegionalPeriodDemand p;
    for (std::size_t i = 0; i < n; ++i) {
      p.demand.push_back(u(rng) < 0.1 ? 0.0 : 100 * u(rng));
      p.weights.push_back(0.5 + 1.5 * u(rng));
      p.shortage_cost.push_back(0.5 + 1.5 * u(rng));
      p.surplus_cost.push_back(0.5 + 1.5 * u(rng));
    }
    const double total = std::accumulate(p.demand.begin(), p.demand.end(), 0.0);
    const double supply = trial % 50 == 0 ? total : 1.5 * total * u(rng);
    const auto a = allocate_period(p, supply);
    const double scale = allocation_scale(p, supply);
    const double tol = kBudgetTol * scale;

    const double sum = std::accumulate(a.allocated.begin(), a.allocated.end(), 0.0);
    if (std::abs(sum - supply) > tol) ++budget;
    for (double k : a.allocated) {
      if (k < 0.0) ++negative;
    }
    const bool surplus = supply > total;
    if ((a.branch == AllocationBranch::Surplus) != surplus || a.frugality_index.has_value() == surplus) {
      ++branch;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (surplus && a.allocated[i] < p.demand[i] - tol) ++branch;
      if (!surplus && a.allocated[i] > p.demand[i] + tol) ++branch;
    }
    if (!surplus && total > 0) {
      const auto v = frugality_violations(p, supply);
      const auto passing = std::count(v.begin(), v.end(), 0.0);
      const std::size_t reported = a.frugality_index.value_or(0);
      if (passing == 1) {
        const auto index = static_cast<std::size_t>(std::find(v.begin(), v.end(), 0.0) - v.begin()) + 1;
        if (index != reported) ++frugality;
      } else if (passing == 0) {
        ++near_misses;
        if (reported == 0 || v[reported - 1] > kNearMissTol * scale) ++frugality;
      } else {
        ++ties;
        if (reported == 0 || v[reported - 1] != 0.0) ++frugality;
      }
    }
    if (n <= oracle::kMaxAllocationRegions) {
      ++compared;
      try {
        const auto slow = oracle::brute_force_allocation(p, supply);
        for (std::size_t i = 0; i < n; ++i) {
          const double gap = std::abs(slow[i] - a.allocated[i]);
          worst_component = std::max(worst_component, gap);
          if (gap > kOracleComponentTol) ++oracle_failures;
        }
      } catch (const Error&) {
        ++oracle_errors;
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = budget + negative + branch + frugality + oracle_failures + oracle_errors == 0 &&
                  elapsed < kAllocationSeconds;
  return {ok, format("10000 periods: budget %d, negative %d, branch %d, frugality %d failures "
                     "(%d round-off near misses, %d ties); oracle on %d: worst component %.2e "
                     "(limit %.0e), %d errors; %.2f s",
                     budget, negative, branch, frugality, near_misses, ties, compared,
                     worst_component, kOracleComponentTol, oracle_errors, elapsed)};
}

Outcome worked_shortage_example() {
  RegionalPeriodDemand p;
  p.demand = {30, 10};
  p.weights = {1, 1};
  p.shortage_cost = {1, 1};
  p.surplus_cost = {1, 1};
  const auto a = allocate_period(p, 20);
  const bool exact = a.allocated == std::vector<double>{20, 0} && a.frugality_index == 2u;
  return {exact, format("K = (%.17g, %.17g), I = %d", a.allocated[0], a.allocated[1],
                        static_cast<int>(a.frugality_index.value_or(0)))};
}

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    files[entry.path().filename().string()] = out.str();
  }
  return files;
}

Outcome determinism(const Scenario& bundled, const std::string& scenario_path,
                    const std::string& cli) {
  if (cli.empty()) {
    // No CLI available: compare two in-process renders with different thread counts.
    PipelineOptions one;
    one.threads = 1;
    PipelineOptions many;
    many.threads = 4;
    const auto a = render_outputs(run_pipeline(bundled, one));
    const auto b = render_outputs(run_pipeline(bundled, many));
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].name == b[i].name && a[i].contents == b[i].contents;
    }
    return {same, format("library render, %zu files %s", a.size(), same ? "identical" : "differ")};
  }
  const auto root = fs::temp_directory_path() / "pandemic_acceptance";
  fs::remove_all(root);
  std::map<std::string, std::string> runs[2];
  for (int r = 0; r < 2; ++r) {
    const auto dir = root / ("run" + std::to_string(r));
    const std::string command = "\"" + cli + "\" pipeline --scenario \"" + scenario_path +
                                "\" --out \"" + dir.string() + "\" --threads " +
                                (r == 0 ? "1" : "4") + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, format("pipeline run %d exited with status %d", r + 1, status)};
    }
    runs[r] = read_csvs(dir);
  }
  fs::remove_all(root);
  const bool same = !runs[0].empty() && runs[0] == runs[1];
  return {same, format("two CLI runs, %zu CSV files %s", runs[0].size(),
                       same ? "byte-identical" : "differ")};
}

Outcome case_study_shape(const Scenario& bundled) {
  Scenario s = bundled;
  s.singleuse.reset();
  const auto result = run_pipeline(s);
  const auto& plan = *result.find(ResourceKind::Durable);
  const std::size_t n = plan.regional_demand.size();
  const std::size_t m = result.horizon;
  if (n < 3) return {false, "scenario needs three regions"};

  std::vector<std::size_t> peak(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = plan.regional_demand[i].values;
    peak[i] = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin()) + 1;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return peak[a] < peak[b]; });
  const std::size_t early = order[0];
  const std::vector<std::size_t> late(order.begin() + 1, order.end());

  auto share = [&](std::size_t centre, const std::vector<std::size_t>& to) {
    double part = 0.0;
    double total = 0.0;
    const std::size_t first = centre > kPeakHalfWidth ? centre - kPeakHalfWidth : 1;
    const std::size_t last = std::min(m, centre + kPeakHalfWidth);
    for (std::size_t j = first; j <= last; ++j) {
      for (std::size_t i = 0; i < n; ++i) total += plan.allocation->allocated(i, j);
      for (std::size_t i : to) part += plan.allocation->allocated(i, j);
    }
    return total > 0 ? part / total : 0.0;
  };
  const double early_share = share(peak[early], {early});
  bool ok = early_share >= kEarlyShare;
  std::string detail = format("%s peak day %zu gets %.3f of supply (limit %.2f)",
                              plan.regional_demand[early].region.c_str(), peak[early], early_share,
                              kEarlyShare);
  for (std::size_t i : late) {
    const double late_share = share(peak[i], late);
    ok = ok && late_share >= kLateShare;
    detail += format("; %s peak day %zu: late regions get %.3f (limit %.2f)",
                     plan.regional_demand[i].region.c_str(), peak[i], late_share, kLateShare);
  }
  ok = ok && peak[order[0]] < peak[order[1]] && peak[order[1]] < peak[order[2]];
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the pandemic planner"};
  std::string scenario_path;
  std::string cli;
  app.add_option("--scenario", scenario_path, "Bundled three-region scenario")->required();
  app.add_option("--cli", cli, "pandemic-plan executable for the determinism check");
  CLI11_PARSE(app, argc, argv);

  Scenario bundled;
  try {
    bundled = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"conservation", conservation},
      {"reproduction number", reproduction_number},
      {"durable stockpile optimality", durable_optimality},
      {"asymmetric costs raise the durable stockpile", [&] { return asymmetric_costs_raise_stock(bundled); }},
      {"single-use solver", singleuse_solver},
      {"allocation correctness", allocation_correctness},
      {"worked shortage example", worked_shortage_example},
      {"pipeline determinism", [&] { return determinism(bundled, scenario_path, cli); }},
      {"staggered peaks reallocation", [&] { return case_study_shape(bundled); }},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += outcome.passed ? 0 : 1;
    std::printf("%s %d %s: %s\n", outcome.passed ? "PASS" : "FAIL", ++index, name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
