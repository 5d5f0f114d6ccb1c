#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pandemic/pipeline.hpp"

namespace pandemic {

/// Library version, also reported in run summaries.
std::string_view version() noexcept;

struct ExportedFile {
  std::string name;
  std::string contents;
};

/// Renders every output file for `result`, in a fixed order:
///   trajectory_<region>.csv           day,S,E,I1,I2,I3,R,D   (days 0..m)
///   demand_<resource>_<region>.csv    day,demand             (days 1..m)
///   supply_<resource>.csv             day,supply
///   allocation_<resource>.csv         day,region,allocated,demand,branch,frugality_index
///   summary.json
/// Files are only produced for the stages the result contains. The
/// allocation file has one row per day and region.
std::vector<ExportedFile> render_outputs(const PipelineResult& result);

/// Run report: initial stockpiles, objectives, residuals and the version.
std::string summary_json(const PipelineResult& result);

/// Writes render_outputs() into `dir`, creating it if needed. Throws IoError.
void export_outputs(const PipelineResult& result, const std::filesystem::path& dir);

}  // namespace pandemic
