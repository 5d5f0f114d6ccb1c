#include "pandemic/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pandemic/error.hpp"

namespace pandemic {
namespace {

using State = std::array<double, CompartmentState::kSize>;

constexpr const char* kCompartmentNames[CompartmentState::kSize] = {"S", "E", "I1", "I2",
                                                                    "I3", "R", "D"};

void check_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream msg;
    msg << "epidemic parameter " << name << " must be finite and >= 0 (got " << value << ")";
    fail(Errc::ValidationError, msg.str());
  }
}

State axpy(const State& y, double h, const State& k) noexcept {
  State out;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

State rk4_step(const State& y, const EpidemicParams& p, double h) noexcept {
  const State k1 = seird_rhs(y, p);
  const State k2 = seird_rhs(axpy(y, 0.5 * h, k1), p);
  const State k3 = seird_rhs(axpy(y, 0.5 * h, k2), p);
  const State k4 = seird_rhs(axpy(y, h, k3), p);
  State out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Clamps round-off negatives; returns false if an excursion exceeds the threshold.
bool clamp_negatives(State& y, double threshold, std::size_t& offender) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= 0.0) continue;
    if (-y[i] >= threshold) {
      offender = i;
      return false;
    }
    const double deficit = -y[i];
    y[i] = 0.0;
    auto largest = std::max_element(y.begin(), y.end());
    *largest -= deficit;
  }
  return true;
}

}  // namespace

void EpidemicParams::validate() const {
  check_rate(beta1, "beta1");
  check_rate(beta2, "beta2");
  check_rate(beta3, "beta3");
  check_rate(gamma, "gamma");
  check_rate(delta1, "delta1");
  check_rate(delta2, "delta2");
  check_rate(delta3, "delta3");
  check_rate(p1, "p1");
  check_rate(p2, "p2");
  check_rate(mu, "mu");
  if (!std::isfinite(population) || population <= 0.0) {
    fail(Errc::ValidationError, "epidemic parameter population must be finite and > 0");
  }
}

double CompartmentState::total() const noexcept { return S + E + I1 + I2 + I3 + R + D; }

std::array<double, CompartmentState::kSize> CompartmentState::to_array() const noexcept {
  return {S, E, I1, I2, I3, R, D};
}

CompartmentState CompartmentState::from_array(const std::array<double, kSize>& v) noexcept {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

void CompartmentState::validate(const EpidemicParams& params) const {
  const auto values = to_array();
  for (std::size_t i = 0; i < kSize; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      fail(Errc::ValidationError,
           std::string("compartment ") + kCompartmentNames[i] + " must be finite and >= 0");
    }
  }
  const double n = params.population;
  if (std::abs(total() - n) > 1e-9 * n) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "compartments sum to " << total() << " but population is " << n;
    fail(Errc::ValidationError, msg.str());
  }
}

Trajectory::Trajectory(std::vector<CompartmentState> states, EpidemicParams params)
    : states_(std::move(states)), params_(params) {
  if (states_.empty()) fail(Errc::InvalidArgument, "trajectory needs at least one state");
}

std::array<double, CompartmentState::kSize> seird_rhs(
    const std::array<double, CompartmentState::kSize>& y, const EpidemicParams& p) noexcept {
  const double S = y[0], E = y[1], I1 = y[2], I2 = y[3], I3 = y[4];
  const double infection = (p.beta1 * I1 + p.beta2 * I2 + p.beta3 * I3) * S;
  const double incubation = p.gamma * E;
  const double to_hospital = p.p1 * I1;
  const double to_icu = p.p2 * I2;
  const double deaths = p.mu * I3;
  const double recoveries = p.delta1 * I1 + p.delta2 * I2 + p.delta3 * I3;
  return {
      -infection,
      infection - incubation,
      incubation - (p.delta1 * I1 + to_hospital),
      to_hospital - (p.delta2 * I2 + to_icu),
      to_icu - (p.delta3 * I3 + deaths),
      recoveries,
      deaths,
  };
}

CompartmentState step(const CompartmentState& state, const EpidemicParams& params, double dt,
                      int substeps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(Errc::InvalidArgument, "step: dt must be > 0");
  if (substeps < 1) fail(Errc::InvalidArgument, "step: substeps must be >= 1");

  const double h = dt / substeps;
  const double threshold = 1e-9 * params.population;
  State y = state.to_array();
  for (int s = 0; s < substeps; ++s) {
    y = rk4_step(y, params, h);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) {
        fail(Errc::NonFinite, std::string("compartment ") + kCompartmentNames[i] +
                                  " became non-finite");
      }
    }
    std::size_t offender = 0;
    if (!clamp_negatives(y, threshold, offender)) {
      std::ostringstream msg;
      msg << "compartment " << kCompartmentNames[offender] << " reached " << y[offender]
          << " (beyond 1e-9 N); reduce the step size";
      fail(Errc::NegativityViolation, msg.str());
    }
  }
  return CompartmentState::from_array(y);
}

Trajectory simulate(const CompartmentState& initial, const EpidemicParams& params,
                    std::size_t days, int substeps) {
  params.validate();
  initial.validate(params);
  if (days < 1) fail(Errc::InvalidArgument, "simulate: horizon must be >= 1 day");

  std::vector<CompartmentState> states;
  states.reserve(days + 1);
  states.push_back(initial);
  for (std::size_t day = 1; day <= days; ++day) {
    try {
      states.push_back(step(states.back(), params, 1.0, substeps));
    } catch (const Error& e) {
      fail(e.code(), "day " + std::to_string(day) + ": " + e.what());
    }
  }
  return Trajectory(std::move(states), params);
}

double basic_reproduction_number(const EpidemicParams& p) {
  const double mild_exit = p.p1 + p.delta1;
  const double hospital_exit = p.p2 + p.delta2;
  const double icu_exit = p.mu + p.delta3;
  if (mild_exit == 0.0) fail(Errc::DivisionByZero, "R0: p1 + delta1 is zero");
  if (hospital_exit == 0.0) fail(Errc::DivisionByZero, "R0: p2 + delta2 is zero");
  if (icu_exit == 0.0) fail(Errc::DivisionByZero, "R0: mu + delta3 is zero");
  return p.population * (p.beta1 + p.p1 / hospital_exit * (p.beta2 + p.beta3 * p.p2 / icu_exit)) /
         mild_exit;
}

}  // namespace pandemic
