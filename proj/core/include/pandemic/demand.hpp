#pragma once

#include <span>
#include <string>
#include <vector>

#include "pandemic/epidemic.hpp"

namespace pandemic {

/// Per-case resource requirements used to turn a trajectory into demand.
struct DemandAssessment {
  double ventilator_share = 0.9;  // alpha: share of ICU patients on a ventilator
  double ppe_per_exposed = 5.0;  // PPE sets per newly exposed case
  double ppe_per_hospitalized = 15.0;  // PPE sets per day per I2 patient
  double ppe_per_icu = 20.0;  // PPE sets per day per I3 patient
  /// Optional day-by-day ventilator share (index 0 is day 1). Overrides
  /// `ventilator_share` when non-empty.
  std::vector<double> ventilator_share_by_day;

  void validate() const;
  double ventilator_share_on(std::size_t day) const;

  friend bool operator==(const DemandAssessment&, const DemandAssessment&) = default;
};

/// Daily demand for days 1..m; `values[j - 1]` is the demand on day j.
struct DemandSeries {
  std::string region;
  std::vector<double> values;

  std::size_t horizon() const noexcept { return values.size(); }
};

/// X_j = alpha * I3_j for j = 1..m.
DemandSeries ventilator_demand(const Trajectory& trajectory, const DemandAssessment& assessment);

/// X_j = thetaE * (S_{j-1} - S_j) + thetaI2 * I2_j + thetaI3 * I3_j for j = 1..m.
DemandSeries ppe_demand(const Trajectory& trajectory, const DemandAssessment& assessment);

/// Element-wise sum of regional series. Throws LengthMismatch on unequal
/// horizons and InvalidArgument on an empty list.
DemandSeries aggregate(std::span<const DemandSeries> regional, std::string label = "aggregate");

}  // namespace pandemic
