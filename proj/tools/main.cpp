#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "check.hpp"
#include "pandemic/error.hpp"
#include "pandemic/export.hpp"
#include "pandemic/pipeline.hpp"
#include "pandemic/scenario.hpp"

namespace {

using namespace pandemic;

enum ExitCode { kOk = 0, kOther = 1, kInvalid = 2, kSolver = 3, kIo = 4 };

int exit_code(Errc code) {
  switch (code) {
    case Errc::ParseError:
    case Errc::ValidationError:
    case Errc::InvalidArgument:
    case Errc::LengthMismatch:
    case Errc::DegenerateCosts:
      return kInvalid;
    case Errc::SolverNotConverged:
    case Errc::NoFrugalIndex:
    case Errc::AmbiguousFrugalIndex:
    case Errc::NegativityViolation:
    case Errc::NonFinite:
      return kSolver;
    case Errc::IoError:
      return kIo;
    default:
      return kOther;
  }
}

struct Options {
  std::string scenario;
  std::string out = "pandemic-out";
  ResourceSelection resource = ResourceSelection::All;
  std::uint64_t seed = 1;
  std::optional<int> substeps;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& o, bool with_resource) {
  cmd->add_option("--scenario", o.scenario, "Scenario file")->required();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  if (with_resource) {
    const std::map<std::string, ResourceSelection> names = {
        {"durable", ResourceSelection::Durable},
        {"singleuse", ResourceSelection::SingleUse},
        {"all", ResourceSelection::All}};
    cmd->add_option("--resource", o.resource, "durable, singleuse or all")
        ->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
  }
  cmd->add_option("--seed", o.seed, "Seed for randomised self-checks")->capture_default_str();
  cmd->add_option("--substeps", o.substeps, "RK4 substeps per day")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void require_resources(const Scenario& s, ResourceSelection selection) {
  const bool durable = selection != ResourceSelection::SingleUse;
  const bool singleuse = selection != ResourceSelection::Durable;
  if (selection == ResourceSelection::Durable && !s.durable) {
    fail(Errc::ValidationError, "resource durable: scenario has no [resource durable] section");
  }
  if (selection == ResourceSelection::SingleUse && !s.singleuse) {
    fail(Errc::ValidationError, "resource singleuse: scenario has no [resource singleuse] section");
  }
  if ((durable && s.durable) || (singleuse && s.singleuse)) return;
  fail(Errc::ValidationError, "scenario defines no [resource ...] section");
}

void report(const PipelineResult& result, const std::string& out) {
  for (const auto& plan : result.resources) {
    std::cout << to_string(plan.kind) << ":";
    if (plan.stockpile || plan.schedule) {
      std::cout << " K0=" << plan.initial_stockpile() << " objective=" << plan.objective();
    }
    if (plan.allocation) std::cout << " max_allocation_kkt=" << plan.max_allocation_residual();
    std::cout << '\n';
  }
  std::cout << "wrote " << out << '\n';
}

int run(const std::string& command, const Options& o) {
  const Scenario scenario = load_scenario(o.scenario);
  PipelineOptions options;
  options.substeps = o.substeps;
  options.threads = o.threads;
  options.resources = o.resource;
  if (command == "simulate") {
    options.stop_after = PipelineStage::Simulate;
  } else if (command == "demand") {
    options.stop_after = PipelineStage::Demand;
  } else if (command == "stockpile-durable") {
    options.resources = ResourceSelection::Durable;
    options.stop_after = PipelineStage::Stockpile;
  } else if (command == "stockpile-singleuse") {
    options.resources = ResourceSelection::SingleUse;
    options.stop_after = PipelineStage::Stockpile;
  }
  if (options.stop_after != PipelineStage::Simulate) require_resources(scenario, options.resources);

  const auto result = run_pipeline(scenario, options);
  if (command == "check") {
    bool ok = true;
    for (const auto& line : tools::run_checks(result, scenario, o.seed)) {
      std::cout << (line.passed ? "PASS " : "FAIL ") << line.text << '\n';
      ok = ok && line.passed;
    }
    return ok ? kOk : kSolver;
  }
  export_outputs(result, o.out);
  report(result, o.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pandemic resource planning: epidemic demand, central stockpile, regional allocation"};
  app.set_version_flag("--version", std::string(pandemic::version()));
  app.require_subcommand(1);

  Options options;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Simulate the regional epidemics"},
      {"demand", "Project regional resource demand"},
      {"stockpile-durable", "Optimise the durable initial stockpile"},
      {"stockpile-singleuse", "Optimise the single-use stockpile and release schedule"},
      {"allocate", "Allocate the optimal supply across regions"},
      {"pipeline", "Run all three pillars and export every output"},
      {"check", "Cross-validate the solvers against reference oracles"},
  };
  for (const auto& [name, help] : commands) {
    const std::string command = name;
    const bool with_resource = command != "stockpile-durable" && command != "stockpile-singleuse" &&
                               command != "simulate";
    add_common(app.add_subcommand(command, help), options, with_resource);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), options);
  } catch (const pandemic::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
