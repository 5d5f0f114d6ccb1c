#include "pandemic/demand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

void check_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    fail(Errc::ValidationError, std::string("demand assessment ") + name + " must be finite and >= 0");
  }
}

void check_share(double value) {
  check_nonnegative(value, "ventilator_share");
  if (value > 1.0) fail(Errc::ValidationError, "demand assessment ventilator_share must be <= 1");
}

}  // namespace

void DemandAssessment::validate() const {
  check_share(ventilator_share);
  for (double share : ventilator_share_by_day) check_share(share);
  check_nonnegative(ppe_per_exposed, "ppe_per_exposed");
  check_nonnegative(ppe_per_hospitalized, "ppe_per_hospitalized");
  check_nonnegative(ppe_per_icu, "ppe_per_icu");
}

double DemandAssessment::ventilator_share_on(std::size_t day) const {
  if (ventilator_share_by_day.empty()) return ventilator_share;
  if (day < 1 || day > ventilator_share_by_day.size()) {
    fail(Errc::LengthMismatch, "ventilator share series does not cover day " + std::to_string(day));
  }
  return ventilator_share_by_day[day - 1];
}

DemandSeries ventilator_demand(const Trajectory& trajectory, const DemandAssessment& assessment) {
  assessment.validate();
  const std::size_t m = trajectory.horizon();
  if (!assessment.ventilator_share_by_day.empty() && assessment.ventilator_share_by_day.size() != m) {
    fail(Errc::LengthMismatch, "ventilator share series length " +
                                   std::to_string(assessment.ventilator_share_by_day.size()) +
                                   " does not match horizon " + std::to_string(m));
  }
  DemandSeries out;
  out.values.resize(m);
  for (std::size_t day = 1; day <= m; ++day) {
    out.values[day - 1] = assessment.ventilator_share_on(day) * trajectory.at(day).I3;
  }
  return out;
}

DemandSeries ppe_demand(const Trajectory& trajectory, const DemandAssessment& assessment) {
  assessment.validate();
  const std::size_t m = trajectory.horizon();
  if (m < 1) fail(Errc::InvalidArgument, "ppe_demand needs at least two trajectory states");
  DemandSeries out;
  out.values.resize(m);
  for (std::size_t day = 1; day <= m; ++day) {
    const auto& prev = trajectory.at(day - 1);
    const auto& cur = trajectory.at(day);
    // S is non-increasing; the max() only absorbs round-off.
    const double newly_exposed = std::max(0.0, prev.S - cur.S);
    out.values[day - 1] = assessment.ppe_per_exposed * newly_exposed +
                          assessment.ppe_per_hospitalized * cur.I2 +
                          assessment.ppe_per_icu * cur.I3;
  }
  return out;
}

DemandSeries aggregate(std::span<const DemandSeries> regional, std::string label) {
  if (regional.empty()) fail(Errc::InvalidArgument, "aggregate needs at least one series");
  const std::size_t m = regional.front().horizon();
  for (const auto& series : regional) {
    if (series.horizon() != m) {
      fail(Errc::LengthMismatch, "series '" + series.region + "' has " +
                                     std::to_string(series.horizon()) + " days, expected " +
                                     std::to_string(m));
    }
  }
  // Summing each day in sorted order makes the result independent of region order.
  DemandSeries out{std::move(label), std::vector<double>(m, 0.0)};
  std::vector<double> column(regional.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < regional.size(); ++r) column[r] = regional[r].values[j];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    out.values[j] = sum;
  }
  return out;
}

}  // namespace pandemic
