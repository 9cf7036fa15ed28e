#pragma once

// Averaged phasor model of the inverter -> series impedance -> infinite bus
// circuit. All voltages are per-phase peak values; powers are per phase
// unless a function name says otherwise.

namespace vsglab::grid {

inline constexpr double kPi = 3.14159265358979323846;

struct GridParams {
  double v_grid_peak = 0.0;    // V, per-phase peak
  double omega_nominal = 0.0;  // rad/s
  double r_eq = 0.0;           // ohm
  double x_eq = 0.0;           // ohm, at omega_nominal

  // Throws InvalidParams when an invariant is violated.
  void validate() const;
  double impedance_squared() const { return r_eq * r_eq + x_eq * x_eq; }
};

struct PhasePowers {
  double p_phase = 0.0;  // W
  double q_phase = 0.0;  // var

  double p_total() const { return 3.0 * p_phase; }
  double q_total() const { return 3.0 * q_phase; }
};

// Per-phase peak voltage from a line-to-line RMS rating.
double phase_peak_from_line_rms(double v_line_rms);

// 110 V line-to-line RMS, 60 Hz, series filter + line impedance.
GridParams inductive_preset();
GridParams resistive_preset();
GridParams make_grid(double v_line_rms, double frequency_hz,
                     double l_filter, double l_line, double r_line);

PhasePowers power_flow_exact(double e, const GridParams& params, double delta);

// X >> R approximation.
PhasePowers power_flow_inductive(double e, double v, double x, double delta);

// Small-angle form of power_flow_inductive (sin d ~ d, cos d ~ 1).
PhasePowers power_flow_linearized(double e, double v, double x, double delta);

}  // namespace vsglab::grid
