#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pandemic/pipeline.hpp"
#include "pandemic/scenario.hpp"

namespace pandemic::tools {

struct CheckLine {
  bool passed = false;
  std::string text;
};

/// Cross-validates the solvers in `result` against the reference oracles on
/// down-scaled slices of the scenario: a K0 grid over the full horizon,
/// short windows of the single-use problem and days restricted to at most
/// four regions. `seed` picks the windows and days.
std::vector<CheckLine> run_checks(const PipelineResult& result, const Scenario& scenario,
                                  std::uint64_t seed);

}  // namespace pandemic::tools
