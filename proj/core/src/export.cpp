#include "pandemic/export.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "pandemic/csv.hpp"
#include "pandemic/error.hpp"

#ifndef PANDEMIC_VERSION
#define PANDEMIC_VERSION "0.0.0"
#endif

namespace pandemic {
namespace {

std::string trajectory_csv(const Trajectory& trajectory) {
  CsvWriter csv({"day", "S", "E", "I1", "I2", "I3", "R", "D"});
  for (std::size_t day = 0; day <= trajectory.horizon(); ++day) {
    const auto& s = trajectory.at(day);
    csv.cell(day).cell(s.S).cell(s.E).cell(s.I1).cell(s.I2).cell(s.I3).cell(s.R).cell(s.D);
    csv.end_row();
  }
  return csv.str();
}

std::string series_csv(const char* column, const std::vector<double>& values) {
  CsvWriter csv({"day", column});
  for (std::size_t j = 0; j < values.size(); ++j) {
    csv.cell(j + 1).cell(values[j]);
    csv.end_row();
  }
  return csv.str();
}

std::string allocation_csv(const ResourcePlan& plan) {
  const auto& allocation = *plan.allocation;
  CsvWriter csv({"day", "region", "allocated", "demand", "branch", "frugality_index"});
  for (std::size_t j = 0; j < allocation.periods.size(); ++j) {
    const auto& period = allocation.periods[j];
    for (std::size_t i = 0; i < allocation.regions.size(); ++i) {
      csv.cell(j + 1)
          .cell(std::string_view(allocation.regions[i]))
          .cell(period.allocated[i])
          .cell(plan.regional_demand[i].values[j])
          .cell(to_string(period.branch));
      if (period.frugality_index) {
        csv.cell(*period.frugality_index);
      } else {
        csv.cell(std::string_view{});
      }
      csv.end_row();
    }
  }
  return csv.str();
}

nlohmann::ordered_json resource_summary(const ResourcePlan& plan) {
  nlohmann::ordered_json out;
  double total = 0.0;
  for (double x : plan.aggregate_demand.values) total += x;
  out["total_demand"] = total;
  out["peak_demand"] = plan.aggregate_demand.values.empty()
                           ? 0.0
                           : *std::max_element(plan.aggregate_demand.values.begin(),
                                               plan.aggregate_demand.values.end());
  if (plan.stockpile) {
    out["k0"] = plan.stockpile->initial_stockpile;
    out["k0_unclamped"] = plan.stockpile->unclamped;
    out["pivot"] = plan.stockpile->pivot;
    out["objective"] = plan.stockpile->objective;
  }
  if (plan.schedule) {
    out["k0"] = plan.schedule->initial_stockpile;
    out["objective"] = plan.schedule->objective;
    out["schedule_kkt_residual"] = plan.schedule->kkt_residual;
    double released = 0.0;
    for (double k : plan.schedule->distribution) released += k;
    out["total_released"] = released;
  }
  if (plan.allocation) {
    std::size_t shortage = 0;
    for (const auto& p : plan.allocation->periods) shortage += p.branch == AllocationBranch::Shortage;
    out["shortage_days"] = shortage;
    out["surplus_days"] = plan.allocation->periods.size() - shortage;
    out["max_allocation_kkt_residual"] = plan.max_allocation_residual();
  }
  return out;
}

}  // namespace

std::string_view version() noexcept { return PANDEMIC_VERSION; }

std::string summary_json(const PipelineResult& result) {
  nlohmann::ordered_json doc;
  doc["tool"] = "pandemic-plan";
  doc["version"] = std::string(version());
  doc["scenario"] = result.scenario;
  doc["horizon"] = result.horizon;
  auto regions = nlohmann::ordered_json::array();
  for (const auto& t : result.trajectories) regions.push_back(t.label);
  doc["regions"] = regions;
  auto resources = nlohmann::ordered_json::object();
  for (const auto& plan : result.resources) {
    resources[std::string(to_string(plan.kind))] = resource_summary(plan);
  }
  doc["resources"] = resources;
  return doc.dump(2) + "\n";
}

std::vector<ExportedFile> render_outputs(const PipelineResult& result) {
  std::vector<ExportedFile> files;
  for (const auto& t : result.trajectories) {
    files.push_back({"trajectory_" + t.label + ".csv", trajectory_csv(t.trajectory)});
  }
  for (const auto& plan : result.resources) {
    const std::string name(to_string(plan.kind));
    for (const auto& series : plan.regional_demand) {
      files.push_back({"demand_" + name + "_" + series.region + ".csv",
                       series_csv("demand", series.values)});
    }
    if (!plan.supply.empty()) {
      files.push_back({"supply_" + name + ".csv", series_csv("supply", plan.supply)});
    }
    if (plan.allocation) files.push_back({"allocation_" + name + ".csv", allocation_csv(plan)});
  }
  files.push_back({"summary.json", summary_json(result)});
  return files;
}

void export_outputs(const PipelineResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::IoError, "cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& file : render_outputs(result)) {
    const auto path = dir / file.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << file.contents;
    out.close();
    if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  }
}

}  // namespace pandemic
