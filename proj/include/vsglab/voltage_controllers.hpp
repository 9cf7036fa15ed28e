#pragma once

#include <cstdint>

namespace vsglab::control {

// Commanded inverter voltages are confined to [0.5, 1.5] * v_ref.
double clamp_voltage(double e, double v_ref);
// True when e sits on or beyond a limit.
bool is_clamped(double e, double v_ref);

// Integral reactive-power law with voltage droop:
//   E = (1/k_i) * integral(Q_set - Q_out) dt - d_v * (v_ref - v_meas)
struct PiDroopParams {
  double k_i = 400.0;  // var s / V
  double d_v = 0.0;    // V/V
  double v_ref = 0.0;  // V peak
  double e_init = 0.0; // V peak, initial integrator value

  void validate() const;
};

struct PiDroopState {
  double integrator = 0.0;  // V
  std::uint64_t clamp_events = 0;

  static PiDroopState initial(const PiDroopParams& params) {
    return {params.e_init, 0};
  }
};

struct PiDroopOutput {
  double e_cmd;
  PiDroopState state;
};

PiDroopOutput pi_droop_step(const PiDroopState& state, double q_set, double q_out,
                            double v_meas, const PiDroopParams& params, double dt);

// PI on a blend of reactive and active power errors, biased at v_ref:
//   eps = (Q_set - Q_out) + mix_p * (P_set - P_out)
//   E   = v_ref + k_p * eps + (1/k_i) * integral(eps) dt
struct TunedPiParams {
  double k_p = 0.0;    // V/var
  double k_i = 25.0;   // var s / V
  double mix_p = 100.0;
  double v_ref = 0.0;

  void validate() const;
};

struct TunedPiState {
  double integrator = 0.0;  // V, offset from v_ref
  std::uint64_t clamp_events = 0;
};

struct TunedPiOutput {
  double e_cmd;
  TunedPiState state;
};

TunedPiOutput tuned_pi_step(const TunedPiState& state, double q_set, double q_out,
                            double p_set, double p_out, const TunedPiParams& params,
                            double dt);

}  // namespace vsglab::control
