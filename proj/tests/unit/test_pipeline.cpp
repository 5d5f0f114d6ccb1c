#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <algorithm>

#include "pandemic/export.hpp"
#include "pandemic/pipeline.hpp"
#include "test_util.hpp"

namespace pandemic {
namespace {

using testing::code_of;

Scenario bundled() { return load_scenario(std::string(PANDEMIC_SCENARIO_DIR) + "/three_state.scn"); }

Scenario quiet(std::size_t regions, double production) {
  Scenario s;
  s.name = "quiet";
  s.horizon = 30;
  for (std::size_t i = 0; i < regions; ++i) {
    RegionSpec r;
    r.label = "r" + std::to_string(i);
    r.params.population = 1e5;
    r.params.beta1 = 3e-6;
    r.params.gamma = 0.2;
    r.params.delta1 = 0.1;
    r.initial.S = 1e5;
    s.regions.push_back(r);
  }
  ResourceSpec durable;
  durable.kind = ResourceKind::Durable;
  durable.production_rate = production;
  durable.initial_cost = 10;
  ResourceSpec singleuse = durable;
  singleuse.kind = ResourceKind::SingleUse;
  s.durable = durable;
  s.singleuse = singleuse;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

TEST(Pipeline, ZeroEpidemicNeedsNothing) {
  const auto result = run_pipeline(quiet(3, 0));
  ASSERT_EQ(result.resources.size(), 2u);
  for (const auto& plan : result.resources) {
    for (const auto& series : plan.regional_demand) {
      for (double x : series.values) EXPECT_EQ(x, 0.0);
    }
    EXPECT_EQ(plan.initial_stockpile(), 0.0);
    for (const auto& period : plan.allocation->periods) {
      for (double k : period.allocated) EXPECT_EQ(k, 0.0);
    }
  }
}

TEST(Pipeline, SingleRegionReceivesTheWholeSupply) {
  auto s = bundled();
  s.regions.resize(1);
  const auto result = run_pipeline(s);
  for (const auto& plan : result.resources) {
    for (std::size_t j = 1; j <= s.horizon; ++j) {
      EXPECT_EQ(plan.allocation->allocated(0, j), plan.supply[j - 1]);
    }
  }
}

TEST(Pipeline, BundledScenarioBalancesEveryDay) {
  const auto result = run_pipeline(bundled());
  ASSERT_EQ(result.resources.size(), 2u);
  for (const auto& plan : result.resources) {
    const auto& a = *plan.allocation;
    for (std::size_t j = 0; j < result.horizon; ++j) {
      double sum = 0.0;
      for (double k : a.periods[j].allocated) sum += k;
      EXPECT_NEAR(sum, plan.supply[j], 1e-9 * std::max(1.0, plan.supply[j]));
    }
  }
  EXPECT_GT(result.find(ResourceKind::Durable)->initial_stockpile(), 0.0);
}

TEST(Pipeline, StagesAndSelection) {
  PipelineOptions o;
  o.stop_after = PipelineStage::Simulate;
  EXPECT_TRUE(run_pipeline(bundled(), o).resources.empty());
  o.stop_after = PipelineStage::Stockpile;
  o.resources = ResourceSelection::SingleUse;
  const auto r = run_pipeline(bundled(), o);
  ASSERT_EQ(r.resources.size(), 1u);
  EXPECT_EQ(r.resources[0].kind, ResourceKind::SingleUse);
  EXPECT_TRUE(r.resources[0].schedule.has_value());
  EXPECT_FALSE(r.resources[0].allocation.has_value());
}

TEST(Pipeline, ErrorsNameThePillarAndRegion) {
  auto s = quiet(2, 0);
  s.regions[1].params.beta1 = 50.0 / s.regions[1].params.population;
  s.regions[1].initial.S = 5e4;
  s.regions[1].initial.I1 = 5e4;
  PipelineOptions o;
  o.substeps = 1;
  try {
    run_pipeline(s, o);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NegativityViolation);
    EXPECT_NE(std::string(e.what()).find("Pillar I, region r1"), std::string::npos) << e.what();
  }
}

TEST(Export, FilesAreByteStableAndComplete) {
  const auto dir = std::filesystem::temp_directory_path() / "pandemic_export_test";
  std::filesystem::remove_all(dir);
  const auto s = bundled();
  export_outputs(run_pipeline(s), dir / "a");
  PipelineOptions o;
  o.threads = 3;
  export_outputs(run_pipeline(s, o), dir / "b");
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 3u + 6u + 2u + 2u + 1u);
  const std::size_t m = s.horizon;
  EXPECT_EQ(lines(slurp(dir / "a" / "trajectory_NY.csv")), 1 + m + 1);
  EXPECT_EQ(lines(slurp(dir / "a" / "demand_durable_CA.csv")), 1 + m);
  EXPECT_EQ(lines(slurp(dir / "a" / "supply_singleuse.csv")), 1 + m);
  EXPECT_EQ(lines(slurp(dir / "a" / "allocation_durable.csv")), 1 + m * 3);
  const auto summary = slurp(dir / "a" / "summary.json");
  for (const char* key : {"\"k0\"", "\"objective\"", "\"max_allocation_kkt_residual\"", "\"version\""}) {
    EXPECT_NE(summary.find(key), std::string::npos) << key;
  }
  std::filesystem::remove_all(dir);
}

TEST(Export, UnwritableDirectoryIsAnIoError) {
  const auto result = run_pipeline(quiet(1, 1));
  EXPECT_EQ(code_of([&] { export_outputs(result, "/proc/pandemic/out"); }), Errc::IoError);
}

}  // namespace
}  // namespace pandemic
