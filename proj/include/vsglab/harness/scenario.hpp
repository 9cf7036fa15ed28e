#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsglab/grid_plant.hpp"
#include "vsglab/npc.hpp"
#include "vsglab/voltage_controllers.hpp"
#include "vsglab/vsg_core.hpp"

namespace vsglab::harness {

enum class ControllerKind { kPiDroop, kTunedPi, kNpc };

const char* controller_name(ControllerKind kind);
ControllerKind parse_controller(const std::string& name);

struct ScheduleEntry {
  double time = 0.0;   // s
  double p_set = 0.0;  // W
  double q_set = 0.0;  // var
};

// Random reference excitation used when collecting training data.
struct ExcitationConfig {
  double p_min = 0.0;
  double p_max = 5000.0;
  double q_min = -2500.0;
  double q_max = 2500.0;
  double dwell_min = 1.0;   // s
  double dwell_max = 10.0;  // s
  double e_dither = 0.5;    // V, uniform +-amplitude added to the command
  // Each dither value is held for a uniform random time in this range.
  double dither_hold_min = 1e-3;  // s
  double dither_hold_max = 1e-3;  // s

  void validate() const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string grid_preset = "inductive";  // inductive | resistive | custom
  grid::GridParams grid = grid::inductive_preset();
  ControllerKind controller = ControllerKind::kPiDroop;
  vsg::VsgParams vsg = vsg::VsgParams::defaults();
  control::PiDroopParams pi_droop;
  control::TunedPiParams tuned_pi;
  npc::NpcParams npc;
  std::vector<ScheduleEntry> reference_schedule;
  double duration = 25.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::optional<std::string> model_path;
  ExcitationConfig excitation;
  bool npc_diagnostics = false;

  // Throws ConfigError / InvalidParams.
  void validate() const;
  std::size_t steps() const;
  ScheduleEntry reference_at(double t) const;
};

// Default gains, frozen from closed-loop tuning runs.
inline constexpr double kDefaultPiDroopKi = 400.0;
inline constexpr double kDefaultTunedKp = 0.0;
inline constexpr double kDefaultTunedKi = 25.0;
inline constexpr double kDefaultTunedMix = 100.0;

// P: 0 -> 2 kW at 1 s, 2 -> 4 kW at 8 s; Q: 0 -> 1 kvar at 15 s; 25 s long.
std::vector<ScheduleEntry> headline_schedule();

// Preset scenario with every default filled in for the given grid.
ScenarioConfig make_scenario(const std::string& grid_preset, ControllerKind controller);

// JSON mirrors ScenarioConfig; unknown keys are rejected. Relative model
// paths are resolved against base_dir.
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = "");
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& config);

}  // namespace vsglab::harness
