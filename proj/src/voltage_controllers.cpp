#include "vsglab/voltage_controllers.hpp"

#include <algorithm>
#include <cmath>

#include "vsglab/errors.hpp"

namespace vsglab::control {
namespace {

double lower_limit(double v_ref) { return 0.5 * v_ref; }
double upper_limit(double v_ref) { return 1.5 * v_ref; }

// Integrator update with anti-windup: the output is offset + integrator, and
// an increment that would push it past a limit only carries the integrator up
// to that limit.
double integrate_limited(double integrator, double increment, double offset, double v_ref) {
  const double candidate = integrator + increment;
  if (increment > 0.0 && offset + candidate > upper_limit(v_ref)) {
    return std::max(integrator, upper_limit(v_ref) - offset);
  }
  if (increment < 0.0 && offset + candidate < lower_limit(v_ref)) {
    return std::min(integrator, lower_limit(v_ref) - offset);
  }
  return candidate;
}

}  // namespace

double clamp_voltage(double e, double v_ref) {
  return std::clamp(e, lower_limit(v_ref), upper_limit(v_ref));
}

bool is_clamped(double e, double v_ref) {
  return e <= lower_limit(v_ref) || e >= upper_limit(v_ref);
}

void PiDroopParams::validate() const {
  if (!(k_i > 0.0)) throw InvalidParams("pi_droop.k_i must be positive");
  if (!(d_v >= 0.0)) throw InvalidParams("pi_droop.d_v must be non-negative");
  if (!(v_ref > 0.0)) throw InvalidParams("pi_droop.v_ref must be positive");
}

void TunedPiParams::validate() const {
  if (!(k_i > 0.0)) throw InvalidParams("tuned_pi.k_i must be positive");
  if (!std::isfinite(mix_p)) throw InvalidParams("tuned_pi.mix_p must be finite");
  if (!std::isfinite(k_p)) throw InvalidParams("tuned_pi.k_p must be finite");
  if (!(v_ref > 0.0)) throw InvalidParams("tuned_pi.v_ref must be positive");
}

PiDroopOutput pi_droop_step(const PiDroopState& state, double q_set, double q_out,
                            double v_meas, const PiDroopParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  PiDroopState next = state;
  const double increment = (q_set - q_out) * dt / params.k_i;
  const double droop = params.d_v * (params.v_ref - v_meas);

  next.integrator = integrate_limited(state.integrator, increment, -droop, params.v_ref);
  const double raw = next.integrator - droop;
  if (is_clamped(raw, params.v_ref)) ++next.clamp_events;
  return {clamp_voltage(raw, params.v_ref), next};
}

TunedPiOutput tuned_pi_step(const TunedPiState& state, double q_set, double q_out,
                            double p_set, double p_out, const TunedPiParams& params,
                            double dt) {
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  TunedPiState next = state;
  const double error = (q_set - q_out) + params.mix_p * (p_set - p_out);
  const double increment = error * dt / params.k_i;
  const double proportional = params.k_p * error;

  next.integrator = integrate_limited(state.integrator, increment, params.v_ref + proportional, params.v_ref);
  const double raw = params.v_ref + proportional + next.integrator;
  if (is_clamped(raw, params.v_ref)) ++next.clamp_events;
  return {clamp_voltage(raw, params.v_ref), next};
}

}  // namespace vsglab::control
