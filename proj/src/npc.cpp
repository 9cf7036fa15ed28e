#include "vsglab/npc.hpp"

#include <algorithm>
#include <cmath>

#include "vsglab/voltage_controllers.hpp"

namespace vsglab::npc {

void NpcParams::validate() const {
  if (horizon_steps < 1) throw InvalidParams("npc.horizon_steps must be >= 1");
  if (!(dt > 0.0)) throw InvalidParams("npc.dt must be positive");
  if (!(gamma >= 0.0)) throw InvalidParams("npc.gamma must be non-negative");
  if (candidate_set.empty()) throw InvalidParams("npc.candidate_set must be non-empty");
  if (std::find(candidate_set.begin(), candidate_set.end(), 0.0) == candidate_set.end()) {
    throw InvalidParams("npc.candidate_set must contain 0");
  }
  if (!(p_rated > 0.0)) throw InvalidParams("npc.p_rated must be positive");
  if (!(v_ref > 0.0)) throw InvalidParams("npc.v_ref must be positive");
}

bool exceeds_training_range(const nn::Mlp& net, std::span<const double> y) {
  for (std::size_t c = 0; c < y.size(); ++c) {
    const double bound = std::max({std::abs(net.output_min[c]), std::abs(net.output_max[c]),
                                   net.output_max[c] - net.output_min[c]});
    if (bound > 0.0 && std::abs(y[c]) > 10.0 * bound) return true;
  }
  return false;
}

RolloutResult rollout_cost(const nn::Mlp& net, const nn::PlantOutputVec& y0,
                           double e_current, double delta_u, const References& refs,
                           const NpcParams& params) {
  if (!net.training.trained) throw InvalidParams("npc requires a trained network");
  const double e = e_current + delta_u;
  const double scale = 1.0 / (params.p_rated * params.p_rated);

  RolloutResult result;
  result.candidate = delta_u;
  if (params.retain_trajectories) result.trajectory.reserve(params.horizon_steps);

  nn::ForwardWorkspace ws;
  nn::PlantOutputVec y = y0;
  nn::OutputArray next{};
  double cost = 0.0;
  for (std::size_t i = 0; i < params.horizon_steps; ++i) {
    y.refresh_errors(refs.p_set, refs.q_set);
    const nn::InputArray in = nn::make_input(y, e);
    try {
      net.predict(in, next, ws);
    } catch (const nn::NonFiniteOutput&) {
      result.diverged = true;
      return result;
    }
    if (exceeds_training_range(net, next)) {
      result.diverged = true;
      return result;
    }
    y = nn::PlantOutputVec::from_array(next);
    const double ep = refs.p_set - y.p_out;
    const double eq = refs.q_set - y.q_out;
    cost += (ep * ep + eq * eq) * scale;
    if (params.retain_trajectories) result.trajectory.push_back(y);
  }
  result.cost = cost + params.gamma * delta_u * delta_u;
  if (!std::isfinite(result.cost)) {
    result.diverged = true;
    result.cost = std::numeric_limits<double>::infinity();
  }
  return result;
}

Selection select_control(const nn::Mlp& net, const nn::PlantOutputVec& y0,
                         double e_current, const References& refs, const NpcParams& params) {
  Selection sel;
  sel.candidates.reserve(params.candidate_set.size());
  for (double du : params.candidate_set) {
    sel.candidates.push_back(rollout_cost(net, y0, e_current, du, refs, params));
  }

  bool found = false;
  for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
    const auto& c = sel.candidates[i];
    if (c.diverged) continue;
    if (!found) {
      sel.index = i;
      found = true;
      continue;
    }
    const auto& best = sel.candidates[sel.index];
    if (c.cost < best.cost ||
        (c.cost == best.cost && std::abs(c.candidate) < std::abs(best.candidate))) {
      sel.index = i;
    }
  }
  if (!found) {
    sel.all_divergent = true;
    sel.delta_u = 0.0;
    const auto zero = std::find(params.candidate_set.begin(), params.candidate_set.end(), 0.0);
    sel.index = static_cast<std::size_t>(zero - params.candidate_set.begin());
    return sel;
  }
  sel.delta_u = sel.candidates[sel.index].candidate;
  return sel;
}

double npc_step(NpcState& state, const nn::Mlp& net, const nn::PlantOutputVec& measured,
                const References& refs, const NpcParams& params) {
  state.last = select_control(net, measured, state.e_cmd, refs, params);
  if (state.last.all_divergent) ++state.all_divergent_warnings;
  state.e_cmd = control::clamp_voltage(state.e_cmd + state.last.delta_u, params.v_ref);
  return state.e_cmd;
}

}  // namespace vsglab::npc
