#pragma once

#include <vector>

#include "vsglab/harness/simulation.hpp"

namespace vsglab::harness {

struct TuneGrid {
  std::vector<double> k_p{0.0, 1e-4, 1e-3};
  std::vector<double> k_i{10.0, 25.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0};
  std::vector<double> mix_p{0.0, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0};
};

struct TuneCandidate {
  control::TunedPiParams params;
  bool gate = false;       // error < 1% of rated from 5 s after every step onward
  double objective = 0.0;  // (ISE_P + ISE_Q) / p_rated^2, s
  bool faulted = false;
};

struct TuneResult {
  TuneCandidate best;  // lowest objective among gate passers (or overall if none pass)
  bool any_gate = false;
  std::vector<TuneCandidate> candidates;  // grid order
};

inline constexpr double kTuneGateFraction = 0.01;
inline constexpr double kTuneGateDelay = 5.0;  // s

// Scores a finished run against the gate and objective above.
TuneCandidate score_tuned_run(const RunRecord& record, const ScenarioConfig& config);

// Exhaustive search over the grid with config's grid, schedule and duration;
// the controller is forced to tuned_pi.
TuneResult tune_pi_grid(const ScenarioConfig& config, const TuneGrid& grid = {});

}  // namespace vsglab::harness
