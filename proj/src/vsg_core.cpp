#include "vsglab/vsg_core.hpp"

#include <cmath>

#include "vsglab/errors.hpp"
#include "vsglab/grid_plant.hpp"

namespace vsglab::vsg {

void VsgParams::validate() const {
  if (!(j_inertia > 0.0)) throw InvalidParams("j_inertia must be positive");
  if (!(d_p >= 0.0)) throw InvalidParams("d_p must be non-negative");
  if (!(omega_ref > 0.0)) throw InvalidParams("omega_ref must be positive");
  if (!(p_rated > 0.0)) throw InvalidParams("p_rated must be positive");
}

double droop_damping(double p_rated, double omega_ref, double droop_fraction) {
  return p_rated / (droop_fraction * omega_ref);
}

VsgParams VsgParams::defaults() {
  VsgParams p;
  p.j_inertia = 0.1;
  p.omega_ref = 2.0 * grid::kPi * 60.0;
  p.p_rated = 5000.0;
  p.d_p = droop_damping(p.p_rated, p.omega_ref, 0.04);
  return p;
}

double swing_acceleration(const VsgState& state, double p_set, double p_out,
                          const VsgParams& params) {
  const double damping = params.d_p * (state.omega_i - params.omega_ref);
  return (p_set - p_out - damping) / (params.j_inertia * state.omega_i);
}

VsgState swing_step(const VsgState& state, double p_set, double p_out,
                    const VsgParams& params, double omega_grid, double dt) {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  if (!(state.omega_i > 0.0)) throw NumericFault("omega_i must stay positive");

  VsgState next = state;
  next.omega_i = state.omega_i + swing_acceleration(state, p_set, p_out, params) * dt;
  if (!(next.omega_i > 0.0) || !std::isfinite(next.omega_i)) {
    throw NumericFault("virtual rotor speed diverged");
  }
  next.theta = state.theta + next.omega_i * dt;
  next.delta = state.delta + (next.omega_i - omega_grid) * dt;
  return next;
}

}  // namespace vsglab::vsg
