#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pandemic/allocation.hpp"
#include "pandemic/cost_model.hpp"
#include "pandemic/demand.hpp"
#include "pandemic/epidemic.hpp"

namespace pandemic {

enum class ResourceKind { Durable, SingleUse };

/// "durable" or "singleuse"; used in file names and the scenario format.
std::string_view to_string(ResourceKind kind) noexcept;

enum class StockpileWeightRule { ProportionalToDemand, Uniform };
enum class AllocationWeightRule { RemainingDemand, Uniform };

std::string_view to_string(StockpileWeightRule rule) noexcept;
std::string_view to_string(AllocationWeightRule rule) noexcept;

struct RegionSpec {
  std::string label;
  EpidemicParams params;
  CompartmentState initial;

  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

/// Cost inputs for one resource. Per-day fields hold either a single value
/// applied to every day or exactly one value per day. Costs are per unit; the
/// loader has already applied any `cost_basis` conversion.
struct ResourceSpec {
  ResourceKind kind = ResourceKind::Durable;
  double production_rate = 0.0;
  std::vector<double> possession_cost{0.0};
  double initial_cost = 0.0;
  std::vector<double> shortage_cost{1.0};
  std::vector<double> surplus_cost{1.0};
  StockpileWeightRule weights = StockpileWeightRule::ProportionalToDemand;
  std::vector<double> allocation_shortage_cost{1.0};
  std::vector<double> allocation_surplus_cost{1.0};
  AllocationWeightRule allocation_weights = AllocationWeightRule::RemainingDemand;

  friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

struct Scenario {
  std::string name = "scenario";
  std::size_t horizon = 0;
  int substeps = kDefaultSubsteps;
  DemandAssessment assessment;
  std::vector<RegionSpec> regions;
  std::optional<ResourceSpec> durable;
  std::optional<ResourceSpec> singleuse;

  const std::optional<ResourceSpec>& resource(ResourceKind kind) const noexcept {
    return kind == ResourceKind::Durable ? durable : singleuse;
  }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the scenario text format:
///
///   [scenario]            name, horizon, substeps
///   [demand]              ventilator_share, ppe_per_exposed,
///                         ppe_per_hospitalized, ppe_per_icu,
///                         ventilator_share_by_day
///   [region <label>]      population, beta1..beta3, gamma, delta1..delta3,
///                         p1, p2, mu, initial_S, initial_E, initial_I1,
///                         initial_I2, initial_I3, initial_R, initial_D
///   [resource durable]    production_rate, possession_cost, initial_cost,
///   [resource singleuse]  shortage_cost, surplus_cost, weights, cost_basis,
///                         allocation_shortage_cost, allocation_surplus_cost,
///                         allocation_weights
///
/// Lines are `key = value`; `#` starts a comment. Per-day fields take a single
/// number or a comma-separated list of `horizon` numbers. `cost_basis` is the
/// number of units that `possession_cost` and `initial_cost` are quoted for.
/// `initial_S` defaults to the population minus the other compartments.
/// Unknown sections or keys, duplicates and malformed numbers raise ParseError
/// with the line number; the parsed scenario is then validated.
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");

/// Reads and parses a scenario file. IoError if it cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes `scenario` in the text format; parse_scenario() reads it back equal.
std::string format_scenario(const Scenario& scenario);

/// Expands a per-day field to `days` entries.
std::vector<double> per_day(const std::vector<double>& field, std::size_t days);

/// Stockpile cost model for `resource` over the aggregate demand.
CostModel stockpile_cost_model(const ResourceSpec& resource, std::span<const double> aggregate_demand);

/// Allocation weights and costs for `resource` over the regional demands.
RegionalCosts allocation_costs(const ResourceSpec& resource, std::span<const DemandSeries> demand);

}  // namespace pandemic
