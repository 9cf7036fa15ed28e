#pragma once

// Active-power / frequency loop of the virtual synchronous generator:
//   P_set - P_out = J * w * dw/dt + D_p * (w - w_ref)
// written directly in power form.

namespace vsglab::vsg {

struct VsgParams {
  double j_inertia = 0.0;  // kg m^2
  double d_p = 0.0;        // W s / rad
  double omega_ref = 0.0;  // rad/s
  double p_rated = 0.0;    // W, three-phase

  void validate() const;

  // 0.1 kg m^2, 60 Hz, 5 kW, 4 % frequency droop.
  static VsgParams defaults();
};

// Damping gain that delivers rated power at the given relative frequency
// deviation.
double droop_damping(double p_rated, double omega_ref, double droop_fraction);

struct VsgState {
  double omega_i = 0.0;  // rad/s
  double theta = 0.0;    // rad, unwrapped
  double delta = 0.0;    // rad, relative to the grid phasor

  static VsgState synchronized(const VsgParams& params) {
    return {params.omega_ref, 0.0, 0.0};
  }
};

double swing_acceleration(const VsgState& state, double p_set, double p_out,
                          const VsgParams& params);

// One semi-implicit Euler step: the velocity is advanced first and the angles
// are integrated with the updated velocity. Throws NumericFault if the
// velocity leaves (0, inf).
VsgState swing_step(const VsgState& state, double p_set, double p_out,
                    const VsgParams& params, double omega_grid, double dt);

}  // namespace vsglab::vsg
