#include "pandemic/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pandemic/csv.hpp"
#include "pandemic/error.hpp"

namespace pandemic {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_label(std::string_view label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '_' || ch == '-' || ch == '.';
  });
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  Scenario run() {
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      auto end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_;
      handle(text_.substr(pos, end - pos));
      pos = end + 1;
    }
    finish_section();
    scenario_.validate();
    return std::move(scenario_);
  }

 private:
  enum class Section { None, Scenario, Demand, Region, Resource };

  [[noreturn]] void error(const std::string& msg) const {
    fail(Errc::ParseError, std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
  }

  void handle(std::string_view raw) {
    auto line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) return;
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      open_section(trim(line.substr(1, line.size() - 2)));
      return;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) error("expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) error("missing key");
    if (value.empty()) error("missing value for '" + std::string(key) + "'");
    if (section_ == Section::None) error("'" + std::string(key) + "' appears before any section");
    if (!seen_keys_.insert(std::string(key)).second) {
      error("duplicate key '" + std::string(key) + "' in [" + section_name_ + "]");
    }
    assign(key, value);
  }

  void open_section(std::string_view header) {
    finish_section();
    std::istringstream words{std::string(header)};
    std::string kind, label, extra;
    words >> kind >> label >> extra;
    if (!extra.empty()) error("unexpected text in section header [" + std::string(header) + "]");
    section_name_ = std::string(header);
    if (!seen_sections_.insert(kind + " " + label).second) {
      error("duplicate section [" + section_name_ + "]");
    }
    if (kind == "scenario" && label.empty()) {
      section_ = Section::Scenario;
    } else if (kind == "demand" && label.empty()) {
      section_ = Section::Demand;
    } else if (kind == "region") {
      if (!valid_label(label)) error("region label must be letters, digits, '_', '-' or '.'");
      section_ = Section::Region;
      scenario_.regions.push_back(RegionSpec{label, {}, {}});
      initial_s_given_ = false;
    } else if (kind == "resource" && (label == "durable" || label == "singleuse")) {
      section_ = Section::Resource;
      resource_ = ResourceSpec{};
      resource_.kind = label == "durable" ? ResourceKind::Durable : ResourceKind::SingleUse;
      cost_basis_ = 1.0;
    } else {
      error("unknown section [" + section_name_ + "]");
    }
  }

  void finish_section() {
    if (section_ == Section::Region && !initial_s_given_) {
      auto& r = scenario_.regions.back();
      r.initial.S = r.params.population - (r.initial.E + r.initial.I1 + r.initial.I2 +
                                           r.initial.I3 + r.initial.R + r.initial.D);
    }
    if (section_ == Section::Resource) {
      if (!(cost_basis_ > 0.0)) error("cost_basis must be > 0");
      if (cost_basis_ != 1.0) {
        for (double& c : resource_.possession_cost) c /= cost_basis_;
        resource_.initial_cost /= cost_basis_;
      }
      auto& slot = resource_.kind == ResourceKind::Durable ? scenario_.durable : scenario_.singleuse;
      slot = resource_;
    }
    section_ = Section::None;
    seen_keys_.clear();
  }

  double number(std::string_view key, std::string_view text) const {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
      error("'" + std::string(key) + "' expects a finite number, got '" + std::string(text) + "'");
    }
    return value;
  }

  std::size_t count(std::string_view key, std::string_view text) const {
    unsigned long long value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      error("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(text) + "'");
    }
    return static_cast<std::size_t>(value);
  }

  std::vector<double> list(std::string_view key, std::string_view text) const {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      out.push_back(number(key, trim(text.substr(pos, comma - pos))));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  void assign(std::string_view key, std::string_view value) {
    switch (section_) {
      case Section::Scenario: return assign_scenario(key, value);
      case Section::Demand: return assign_demand(key, value);
      case Section::Region: return assign_region(key, value);
      case Section::Resource: return assign_resource(key, value);
      case Section::None: break;
    }
  }

  void assign_scenario(std::string_view key, std::string_view value) {
    if (key == "name") {
      scenario_.name = std::string(value);
    } else if (key == "horizon") {
      scenario_.horizon = count(key, value);
    } else if (key == "substeps") {
      const auto n = count(key, value);
      if (n > 1000000) error("substeps is too large");
      scenario_.substeps = static_cast<int>(n);
    } else {
      unknown(key);
    }
  }

  void assign_demand(std::string_view key, std::string_view value) {
    auto& d = scenario_.assessment;
    if (key == "ventilator_share") {
      d.ventilator_share = number(key, value);
    } else if (key == "ppe_per_exposed") {
      d.ppe_per_exposed = number(key, value);
    } else if (key == "ppe_per_hospitalized") {
      d.ppe_per_hospitalized = number(key, value);
    } else if (key == "ppe_per_icu") {
      d.ppe_per_icu = number(key, value);
    } else if (key == "ventilator_share_by_day") {
      d.ventilator_share_by_day = list(key, value);
    } else {
      unknown(key);
    }
  }

  void assign_region(std::string_view key, std::string_view value) {
    auto& r = scenario_.regions.back();
    static const std::map<std::string_view, double EpidemicParams::*> rates = {
        {"population", &EpidemicParams::population}, {"beta1", &EpidemicParams::beta1},
        {"beta2", &EpidemicParams::beta2},           {"beta3", &EpidemicParams::beta3},
        {"gamma", &EpidemicParams::gamma},           {"delta1", &EpidemicParams::delta1},
        {"delta2", &EpidemicParams::delta2},         {"delta3", &EpidemicParams::delta3},
        {"p1", &EpidemicParams::p1},                 {"p2", &EpidemicParams::p2},
        {"mu", &EpidemicParams::mu},
    };
    static const std::map<std::string_view, double CompartmentState::*> initial = {
        {"initial_S", &CompartmentState::S},   {"initial_E", &CompartmentState::E},
        {"initial_I1", &CompartmentState::I1}, {"initial_I2", &CompartmentState::I2},
        {"initial_I3", &CompartmentState::I3}, {"initial_R", &CompartmentState::R},
        {"initial_D", &CompartmentState::D},
    };
    if (auto it = rates.find(key); it != rates.end()) {
      r.params.*(it->second) = number(key, value);
    } else if (auto jt = initial.find(key); jt != initial.end()) {
      r.initial.*(jt->second) = number(key, value);
      initial_s_given_ = initial_s_given_ || key == "initial_S";
    } else {
      unknown(key);
    }
  }

  AllocationWeightRule allocation_rule(std::string_view key, std::string_view value) const {
    if (value == "remaining_demand") return AllocationWeightRule::RemainingDemand;
    if (value == "uniform") return AllocationWeightRule::Uniform;
    error("'" + std::string(key) + "' must be remaining_demand or uniform");
  }

  void assign_resource(std::string_view key, std::string_view value) {
    auto& r = resource_;
    if (key == "production_rate") {
      r.production_rate = number(key, value);
    } else if (key == "possession_cost") {
      r.possession_cost = list(key, value);
    } else if (key == "initial_cost") {
      r.initial_cost = number(key, value);
    } else if (key == "shortage_cost") {
      r.shortage_cost = list(key, value);
    } else if (key == "surplus_cost") {
      r.surplus_cost = list(key, value);
    } else if (key == "cost_basis") {
      cost_basis_ = number(key, value);
    } else if (key == "weights") {
      if (value == "proportional_to_demand") {
        r.weights = StockpileWeightRule::ProportionalToDemand;
      } else if (value == "uniform") {
        r.weights = StockpileWeightRule::Uniform;
      } else {
        error("'weights' must be proportional_to_demand or uniform");
      }
    } else if (key == "allocation_shortage_cost") {
      r.allocation_shortage_cost = list(key, value);
    } else if (key == "allocation_surplus_cost") {
      r.allocation_surplus_cost = list(key, value);
    } else if (key == "allocation_weights") {
      r.allocation_weights = allocation_rule(key, value);
    } else {
      unknown(key);
    }
  }

  [[noreturn]] void unknown(std::string_view key) const {
    error("unknown key '" + std::string(key) + "' in [" + section_name_ + "]");
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t line_ = 0;
  Section section_ = Section::None;
  std::string section_name_;
  std::set<std::string> seen_keys_;
  std::set<std::string> seen_sections_;
  bool initial_s_given_ = false;
  double cost_basis_ = 1.0;
  ResourceSpec resource_;
  Scenario scenario_;
};

[[noreturn]] void invalid(const std::string& field, const std::string& constraint) {
  fail(Errc::ValidationError, field + ": " + constraint);
}

void check_per_day(const std::vector<double>& field, std::size_t horizon, const std::string& name,
                   bool strictly_positive) {
  if (field.size() != 1 && field.size() != horizon) {
    invalid(name, "expects 1 or " + std::to_string(horizon) + " values, got " +
                      std::to_string(field.size()));
  }
  for (double v : field) {
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0)) {
      invalid(name, strictly_positive ? "values must be finite and > 0" : "values must be finite and >= 0");
    }
  }
}

// Runs a component validator and prefixes its message with the field path.
void within(const std::string& field, const std::function<void()>& check) {
  try {
    check();
  } catch (const Error& e) {
    invalid(field, e.what());
  }
}

void validate_resource(const ResourceSpec& r, std::size_t horizon) {
  const std::string prefix = "resource " + std::string(to_string(r.kind)) + ".";
  if (!std::isfinite(r.production_rate) || r.production_rate < 0.0) {
    invalid(prefix + "production_rate", "must be finite and >= 0");
  }
  if (!std::isfinite(r.initial_cost) || r.initial_cost < 0.0) {
    invalid(prefix + "initial_cost", "must be finite and >= 0");
  }
  check_per_day(r.possession_cost, horizon, prefix + "possession_cost", false);
  check_per_day(r.shortage_cost, horizon, prefix + "shortage_cost", false);
  check_per_day(r.surplus_cost, horizon, prefix + "surplus_cost", false);
  if (std::none_of(r.shortage_cost.begin(), r.shortage_cost.end(), [](double v) { return v > 0.0; })) {
    invalid(prefix + "shortage_cost", "must be positive on some day");
  }
  check_per_day(r.allocation_shortage_cost, horizon, prefix + "allocation_shortage_cost", true);
  check_per_day(r.allocation_surplus_cost, horizon, prefix + "allocation_surplus_cost", true);
}

void write_list(std::ostringstream& out, const char* key, const std::vector<double>& values) {
  out << key << " = ";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_number(values[i]);
  }
  out << '\n';
}

}  // namespace

std::string_view to_string(ResourceKind kind) noexcept {
  return kind == ResourceKind::Durable ? "durable" : "singleuse";
}

std::string_view to_string(StockpileWeightRule rule) noexcept {
  return rule == StockpileWeightRule::Uniform ? "uniform" : "proportional_to_demand";
}

std::string_view to_string(AllocationWeightRule rule) noexcept {
  return rule == AllocationWeightRule::Uniform ? "uniform" : "remaining_demand";
}

void Scenario::validate() const {
  if (name.empty()) invalid("scenario.name", "must not be empty");
  if (horizon < 1) invalid("scenario.horizon", "must be >= 1");
  if (substeps < 1) invalid("scenario.substeps", "must be >= 1");
  within("demand", [&] { assessment.validate(); });
  if (!assessment.ventilator_share_by_day.empty() &&
      assessment.ventilator_share_by_day.size() != horizon) {
    invalid("demand.ventilator_share_by_day",
            "expects " + std::to_string(horizon) + " values, got " +
                std::to_string(assessment.ventilator_share_by_day.size()));
  }
  if (regions.empty()) invalid("region", "at least one [region <label>] section is required");
  std::set<std::string> labels;
  for (const auto& r : regions) {
    if (!valid_label(r.label)) invalid("region " + r.label, "label must be letters, digits, '_', '-' or '.'");
    if (!labels.insert(r.label).second) invalid("region " + r.label, "label is not unique");
    within("region " + r.label, [&] { r.params.validate(); });
    within("region " + r.label + " initial state", [&] { r.initial.validate(r.params); });
  }
  if (durable) {
    if (durable->kind != ResourceKind::Durable) invalid("resource durable", "kind mismatch");
    validate_resource(*durable, horizon);
  }
  if (singleuse) {
    if (singleuse->kind != ResourceKind::SingleUse) invalid("resource singleuse", "kind mismatch");
    validate_resource(*singleuse, horizon);
  }
}

Scenario parse_scenario(std::string_view text, std::string_view source) {
  return Parser(text, source).run();
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open scenario '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(Errc::IoError, "cannot read scenario '" + path.string() + "'");
  return parse_scenario(buffer.str(), path.string());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "name = " << s.name << '\n'
      << "horizon = " << s.horizon << '\n'
      << "substeps = " << s.substeps << '\n';

  const auto& d = s.assessment;
  out << "\n[demand]\n"
      << "ventilator_share = " << format_number(d.ventilator_share) << '\n'
      << "ppe_per_exposed = " << format_number(d.ppe_per_exposed) << '\n'
      << "ppe_per_hospitalized = " << format_number(d.ppe_per_hospitalized) << '\n'
      << "ppe_per_icu = " << format_number(d.ppe_per_icu) << '\n';
  if (!d.ventilator_share_by_day.empty()) write_list(out, "ventilator_share_by_day", d.ventilator_share_by_day);

  for (const auto& r : s.regions) {
    const auto& p = r.params;
    const auto& x = r.initial;
    out << "\n[region " << r.label << "]\n";
    const std::pair<const char*, double> fields[] = {
        {"population", p.population}, {"beta1", p.beta1},   {"beta2", p.beta2},
        {"beta3", p.beta3},           {"gamma", p.gamma},   {"delta1", p.delta1},
        {"delta2", p.delta2},         {"delta3", p.delta3}, {"p1", p.p1},
        {"p2", p.p2},                 {"mu", p.mu},         {"initial_S", x.S},
        {"initial_E", x.E},           {"initial_I1", x.I1}, {"initial_I2", x.I2},
        {"initial_I3", x.I3},         {"initial_R", x.R},   {"initial_D", x.D},
    };
    for (const auto& [key, value] : fields) out << key << " = " << format_number(value) << '\n';
  }

  for (const auto* r : {&s.durable, &s.singleuse}) {
    if (!*r) continue;
    const auto& res = **r;
    out << "\n[resource " << to_string(res.kind) << "]\n"
        << "production_rate = " << format_number(res.production_rate) << '\n';
    write_list(out, "possession_cost", res.possession_cost);
    out << "initial_cost = " << format_number(res.initial_cost) << '\n';
    write_list(out, "shortage_cost", res.shortage_cost);
    write_list(out, "surplus_cost", res.surplus_cost);
    out << "weights = " << to_string(res.weights) << '\n';
    write_list(out, "allocation_shortage_cost", res.allocation_shortage_cost);
    write_list(out, "allocation_surplus_cost", res.allocation_surplus_cost);
    out << "allocation_weights = " << to_string(res.allocation_weights) << '\n';
  }
  return out.str();
}

std::vector<double> per_day(const std::vector<double>& field, std::size_t days) {
  if (field.size() == days) return field;
  if (field.size() == 1) return std::vector<double>(days, field.front());
  fail(Errc::LengthMismatch, "per-day field has " + std::to_string(field.size()) +
                                 " values for a " + std::to_string(days) + "-day horizon");
}

CostModel stockpile_cost_model(const ResourceSpec& resource, std::span<const double> aggregate_demand) {
  const std::size_t m = aggregate_demand.size();
  CostModel costs;
  costs.production_rate = resource.production_rate;
  costs.weights = resource.weights == StockpileWeightRule::Uniform
                      ? std::vector<double>(m, 1.0)
                      : demand_proportional_weights(aggregate_demand);
  costs.shortage_cost = per_day(resource.shortage_cost, m);
  costs.surplus_cost = per_day(resource.surplus_cost, m);
  costs.possession_cost = per_day(resource.possession_cost, m);
  costs.initial_cost = resource.initial_cost;
  return costs;
}

RegionalCosts allocation_costs(const ResourceSpec& resource, std::span<const DemandSeries> demand) {
  const std::size_t n = demand.size();
  const std::size_t m = n == 0 ? 0 : demand.front().horizon();
  RegionalCosts costs;
  costs.weights = resource.allocation_weights == AllocationWeightRule::Uniform
                      ? std::vector<std::vector<double>>(n, std::vector<double>(m, 1.0))
                      : remaining_demand_weights(demand);
  costs.shortage_cost.assign(n, per_day(resource.allocation_shortage_cost, m));
  costs.surplus_cost.assign(n, per_day(resource.allocation_surplus_cost, m));
  return costs;
}

}  // namespace pandemic
