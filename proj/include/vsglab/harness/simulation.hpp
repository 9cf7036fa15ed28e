#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsglab/harness/scenario.hpp"
#include "vsglab/nn_model.hpp"

namespace vsglab::harness {

struct RunRow {
  double time = 0.0;
  double e_cmd = 0.0;    // V peak applied during this sample
  double omega_i = 0.0;  // rad/s
  double delta = 0.0;    // rad
  double p_out = 0.0;    // W, three-phase
  double q_out = 0.0;    // var, three-phase
  double p_set = 0.0;
  double q_set = 0.0;
};

struct NpcDiagnostic {
  double time = 0.0;
  std::vector<double> costs;  // one per candidate, inf when divergent
  double chosen = 0.0;
};

struct RunRecord {
  std::string name;
  ControllerKind controller = ControllerKind::kPiDroop;
  double dt = 1e-3;
  std::vector<RunRow> rows;
  std::vector<double> candidate_set;         // NPC runs only
  std::vector<NpcDiagnostic> diagnostics;    // NPC runs with diagnostics on
  std::uint64_t clamp_events = 0;
  std::size_t npc_warnings = 0;
  std::optional<std::string> fault;          // set when a numeric fault ended the run early
};

// Steps measure -> voltage control -> swing at the configured period.
// A numeric fault stops the run and is reported in RunRecord::fault with the
// rows simulated so far. An NPC scenario uses `net` when given, otherwise it
// loads config.model_path.
RunRecord run_scenario(const ScenarioConfig& config, const nn::Mlp* net = nullptr);

// Closed loop under a PI-family controller with random references; logs
// (output_k, command_k) -> output_{k+1} pairs that never cross an episode
// (reference dwell) boundary.
nn::Dataset collect_dataset(const ScenarioConfig& config, double duration, std::uint64_t seed);

std::string timeseries_csv(const RunRecord& record);
void write_timeseries_csv(const RunRecord& record, const std::string& path);
std::vector<RunRow> read_timeseries_csv(const std::string& path);

std::string diagnostics_csv(const RunRecord& record);
void write_diagnostics_csv(const RunRecord& record, const std::string& path);

}  // namespace vsglab::harness
