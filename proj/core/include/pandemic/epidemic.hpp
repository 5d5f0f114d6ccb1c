#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace pandemic {

/// Rate constants of the seven-compartment SEIRD model. Transmission rates are
/// per person per day; every other rate is per day.
struct EpidemicParams {
  double beta1 = 0.0;  // transmission by mild cases (I1)
  double beta2 = 0.0;  // transmission by hospitalised cases (I2)
  double beta3 = 0.0;  // transmission by ICU cases (I3)
  double gamma = 0.0;  // E -> I1
  double delta1 = 0.0;  // I1 -> R
  double delta2 = 0.0;  // I2 -> R
  double delta3 = 0.0;  // I3 -> R
  double p1 = 0.0;  // I1 -> I2
  double p2 = 0.0;  // I2 -> I3
  double mu = 0.0;  // I3 -> D
  double population = 1.0;

  /// Throws ValidationError unless all rates are finite and >= 0 and N > 0.
  void validate() const;

  friend bool operator==(const EpidemicParams&, const EpidemicParams&) = default;
};

struct CompartmentState {
  static constexpr std::size_t kSize = 7;

  double S = 0.0;
  double E = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double R = 0.0;
  double D = 0.0;

  double total() const noexcept;
  std::array<double, kSize> to_array() const noexcept;
  static CompartmentState from_array(const std::array<double, kSize>& v) noexcept;

  /// Throws ValidationError unless every compartment is finite and >= 0 and the
  /// compartments sum to N within a relative 1e-9.
  void validate(const EpidemicParams& params) const;

  friend bool operator==(const CompartmentState&, const CompartmentState&) = default;
};

/// Daily compartment states for days 0..m. Immutable once built.
class Trajectory {
 public:
  Trajectory(std::vector<CompartmentState> states, EpidemicParams params);

  std::size_t horizon() const noexcept { return states_.size() - 1; }
  const CompartmentState& at(std::size_t day) const { return states_.at(day); }
  const std::vector<CompartmentState>& states() const noexcept { return states_; }
  const EpidemicParams& params() const noexcept { return params_; }
  double dt() const noexcept { return 1.0; }

 private:
  std::vector<CompartmentState> states_;
  EpidemicParams params_;
};

inline constexpr int kDefaultSubsteps = 4;

/// Time derivative of the SEIRD system. The seven components sum to zero.
std::array<double, CompartmentState::kSize> seird_rhs(
    const std::array<double, CompartmentState::kSize>& y, const EpidemicParams& params) noexcept;

/// Advances `state` by `dt` days with `substeps` classical RK4 steps.
///
/// Negative components produced by the integrator are clamped to zero when
/// their magnitude is below 1e-9 N; the deficit is taken from the largest
/// compartment so the total is unchanged. Larger excursions raise
/// NegativityViolation (the step is too coarse for the rates), and any
/// non-finite value raises NonFinite.
CompartmentState step(const CompartmentState& state, const EpidemicParams& params, double dt,
                      int substeps = kDefaultSubsteps);

/// Runs `days` daily steps from `initial`. Step errors are rethrown with the
/// offending day attached.
Trajectory simulate(const CompartmentState& initial, const EpidemicParams& params, std::size_t days,
                    int substeps = kDefaultSubsteps);

/// Basic reproductive ratio
///   N/(p1+d1) * (b1 + p1/(p2+d2) * (b2 + b3 * p2/(mu+d3))).
/// Throws DivisionByZero when any of the three denominators vanishes.
double basic_reproduction_number(const EpidemicParams& params);

}  // namespace pandemic
