#include "vsglab/harness/tune.hpp"

#include <cmath>
#include <limits>

#include "vsglab/harness/metrics.hpp"

namespace vsglab::harness {

TuneCandidate score_tuned_run(const RunRecord& record, const ScenarioConfig& config) {
  TuneCandidate c;
  c.params = config.tuned_pi;
  if (record.fault) {
    c.faulted = true;
    c.objective = std::numeric_limits<double>::infinity();
    return c;
  }
  const double p_rated = config.npc.p_rated;
  double ise = 0.0;
  for (const auto& r : record.rows) {
    ise += ((r.p_set - r.p_out) * (r.p_set - r.p_out) + (r.q_set - r.q_out) * (r.q_set - r.q_out)) * record.dt;
  }
  c.objective = ise / (p_rated * p_rated);

  const double limit = kTuneGateFraction * p_rated;
  c.gate = true;
  const auto& sched = config.reference_schedule;
  for (std::size_t i = 1; i < sched.size() && c.gate; ++i) {
    const double from = sched[i].time + kTuneGateDelay;
    const double to = i + 1 < sched.size() ? sched[i + 1].time : config.duration;
    for (const auto& r : record.rows) {
      if (r.time < from || r.time >= to) continue;
      if (std::abs(r.p_set - r.p_out) > limit || std::abs(r.q_set - r.q_out) > limit) {
        c.gate = false;
        break;
      }
    }
  }
  return c;
}

TuneResult tune_pi_grid(const ScenarioConfig& config, const TuneGrid& grid) {
  ScenarioConfig cfg = config;
  cfg.controller = ControllerKind::kTunedPi;
  TuneResult out;
  out.best.objective = std::numeric_limits<double>::infinity();
  for (double kp : grid.k_p) {
    for (double ki : grid.k_i) {
      for (double mix : grid.mix_p) {
        cfg.tuned_pi.k_p = kp;
        cfg.tuned_pi.k_i = ki;
        cfg.tuned_pi.mix_p = mix;
        const TuneCandidate c = score_tuned_run(run_scenario(cfg), cfg);
        out.candidates.push_back(c);
        const bool better = c.gate == out.any_gate ? c.objective < out.best.objective : c.gate;
        if (better) {
          out.best = c;
          out.any_gate = out.any_gate || c.gate;
        }
      }
    }
  }
  return out;
}

}  // namespace vsglab::harness
