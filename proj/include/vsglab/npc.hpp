#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "vsglab/nn_model.hpp"

// Neural-network predictive voltage controller. Every control period each
// candidate voltage increment is applied once, held over the prediction
// horizon, rolled forward through the network, and scored; the cheapest
// increment is commanded.

namespace vsglab::npc {

struct References {
  double p_set = 0.0;  // W
  double q_set = 0.0;  // var
};

struct NpcParams {
  std::size_t horizon_steps = 1000;
  double dt = 1e-3;
  double gamma = 0.0;
  std::vector<double> candidate_set{-5.0, -1.0, -0.2, -0.04, 0.0, 0.04, 0.2, 1.0, 5.0};
  double p_rated = 5000.0;  // cost normalization, W
  double v_ref = 0.0;       // clamp centre for the commanded voltage
  bool retain_trajectories = false;

  void validate() const;
};

struct RolloutResult {
  double candidate = 0.0;
  double cost = std::numeric_limits<double>::infinity();
  bool diverged = false;
  std::vector<nn::PlantOutputVec> trajectory;  // filled when retained
};

// Prediction channels beyond 10x the training range mark a divergent rollout.
bool exceeds_training_range(const nn::Mlp& net, std::span<const double> y);

RolloutResult rollout_cost(const nn::Mlp& net, const nn::PlantOutputVec& y0,
                           double e_current, double delta_u, const References& refs,
                           const NpcParams& params);

struct Selection {
  double delta_u = 0.0;
  std::size_t index = 0;
  bool all_divergent = false;
  std::vector<RolloutResult> candidates;
};

// Minimum cost wins; ties go to the smallest |delta_u|, then to the earlier
// candidate. If every candidate diverges the increment is 0.
Selection select_control(const nn::Mlp& net, const nn::PlantOutputVec& y0,
                         double e_current, const References& refs, const NpcParams& params);

struct NpcState {
  double e_cmd = 0.0;
  std::size_t all_divergent_warnings = 0;
  Selection last;
};

// Advances the controller by one period and returns the new voltage command.
double npc_step(NpcState& state, const nn::Mlp& net, const nn::PlantOutputVec& measured,
                const References& refs, const NpcParams& params);

}  // namespace vsglab::npc
