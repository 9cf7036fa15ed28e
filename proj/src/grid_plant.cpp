#include "vsglab/grid_plant.hpp"

#include <cmath>
#include <string>

#include "vsglab/errors.hpp"

namespace vsglab::grid {

void GridParams::validate() const {
  if (!(v_grid_peak > 0.0) || !std::isfinite(v_grid_peak)) {
    throw InvalidParams("v_grid_peak must be positive");
  }
  if (!(omega_nominal > 0.0) || !std::isfinite(omega_nominal)) {
    throw InvalidParams("omega_nominal must be positive");
  }
  if (!(r_eq >= 0.0) || !(x_eq >= 0.0)) {
    throw InvalidParams("r_eq and x_eq must be non-negative");
  }
  if (!(impedance_squared() > 0.0)) {
    throw InvalidParams("impedance magnitude is zero");
  }
}

double phase_peak_from_line_rms(double v_line_rms) {
  return v_line_rms * std::sqrt(2.0) / std::sqrt(3.0);
}

GridParams make_grid(double v_line_rms, double frequency_hz, double l_filter,
                     double l_line, double r_line) {
  GridParams g;
  g.v_grid_peak = phase_peak_from_line_rms(v_line_rms);
  g.omega_nominal = 2.0 * kPi * frequency_hz;
  g.x_eq = g.omega_nominal * (l_filter + l_line);
  g.r_eq = r_line;
  return g;
}

GridParams inductive_preset() { return make_grid(110.0, 60.0, 1e-6, 1e-4, 1e-2); }

GridParams resistive_preset() { return make_grid(110.0, 60.0, 1e-6, 1e-6, 5e-1); }

PhasePowers power_flow_exact(double e, const GridParams& params, double delta) {
  params.validate();
  const double z2 = params.impedance_squared();
  const double v = params.v_grid_peak;
  const double in_phase = e * e - e * v * std::cos(delta);
  const double quadrature = e * v * std::sin(delta);
  return {0.5 * (in_phase * params.r_eq + quadrature * params.x_eq) / z2,
          0.5 * (in_phase * params.x_eq - quadrature * params.r_eq) / z2};
}

PhasePowers power_flow_inductive(double e, double v, double x, double delta) {
  if (!(x > 0.0)) throw InvalidParams("x must be positive");
  return {e * v * std::sin(delta) / (2.0 * x),
          e * (e - v * std::cos(delta)) / (2.0 * x)};
}

PhasePowers power_flow_linearized(double e, double v, double x, double delta) {
  if (!(x > 0.0)) throw InvalidParams("x must be positive");
  return {e * v * delta / (2.0 * x), e * (e - v) / (2.0 * x)};
}

}  // namespace vsglab::grid
