#include "vsglab/harness/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "vsglab/errors.hpp"
#include "vsglab/text_io.hpp"

namespace vsglab::harness {

using nlohmann::json;

const char* controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPiDroop: return "pi_droop";
    case ControllerKind::kTunedPi: return "tuned_pi";
    case ControllerKind::kNpc: return "npc";
  }
  return "unknown";
}

ControllerKind parse_controller(const std::string& name) {
  if (name == "pi_droop") return ControllerKind::kPiDroop;
  if (name == "tuned_pi") return ControllerKind::kTunedPi;
  if (name == "npc") return ControllerKind::kNpc;
  throw ConfigError("unknown controller '" + name + "'");
}

void ExcitationConfig::validate() const {
  if (!(p_min <= p_max) || !(q_min <= q_max)) throw ConfigError("excitation ranges must be ordered");
  if (!(dwell_min > 0.0) || !(dwell_min <= dwell_max)) {
    throw ConfigError("excitation dwell range must be positive and ordered");
  }
  if (!(e_dither >= 0.0)) throw ConfigError("excitation.e_dither must be non-negative");
  if (!(dither_hold_min > 0.0) || !(dither_hold_min <= dither_hold_max)) {
    throw ConfigError("excitation dither hold range must be positive and ordered");
  }
}

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

ScheduleEntry ScenarioConfig::reference_at(double t) const {
  ScheduleEntry current = reference_schedule.front();
  const double eps = 1e-9 * dt;
  for (const auto& e : reference_schedule) {
    if (e.time <= t + eps) current = e;
    else break;
  }
  return current;
}

void ScenarioConfig::validate() const {
  grid.validate();
  vsg.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= 0.0)) throw ConfigError("duration must be non-negative");
  if (reference_schedule.empty()) throw ConfigError("reference_schedule must not be empty");
  if (reference_schedule.front().time != 0.0) throw ConfigError("reference_schedule must start at t = 0");
  for (std::size_t i = 1; i < reference_schedule.size(); ++i) {
    if (!(reference_schedule[i].time > reference_schedule[i - 1].time)) {
      throw ConfigError("reference_schedule times must be strictly increasing");
    }
  }
  switch (controller) {
    case ControllerKind::kPiDroop: pi_droop.validate(); break;
    case ControllerKind::kTunedPi: tuned_pi.validate(); break;
    case ControllerKind::kNpc:
      npc.validate();
      if (!model_path || model_path->empty()) throw ConfigError("npc controller requires model_path");
      break;
  }
  excitation.validate();
}

std::vector<ScheduleEntry> headline_schedule() {
  return {{0.0, 0.0, 0.0}, {1.0, 2000.0, 0.0}, {8.0, 4000.0, 0.0}, {15.0, 4000.0, 1000.0}};
}

ScenarioConfig make_scenario(const std::string& grid_preset, ControllerKind controller) {
  ScenarioConfig c;
  c.grid_preset = grid_preset;
  if (grid_preset == "inductive") {
    c.grid = grid::inductive_preset();
  } else if (grid_preset == "resistive") {
    c.grid = grid::resistive_preset();
  } else {
    throw ConfigError("unknown grid preset '" + grid_preset + "'");
  }
  c.name = grid_preset + "_" + controller_name(controller);
  c.controller = controller;
  const double v = c.grid.v_grid_peak;

  c.pi_droop.k_i = kDefaultPiDroopKi;
  c.pi_droop.d_v = 0.0;
  c.pi_droop.v_ref = v;
  c.pi_droop.e_init = v;

  c.tuned_pi.k_p = kDefaultTunedKp;
  c.tuned_pi.k_i = kDefaultTunedKi;
  c.tuned_pi.mix_p = kDefaultTunedMix;
  c.tuned_pi.v_ref = v;

  c.npc.v_ref = v;
  c.npc.dt = c.dt;
  c.npc.p_rated = c.vsg.p_rated;

  c.reference_schedule = headline_schedule();
  return c;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!keys.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_range(const json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const auto v = obj.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string(key) + " must be [min, max]");
  lo = v[0];
  hi = v[1];
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  try {
    reject_unknown(j, {"name", "grid", "controller", "vsg", "pi_droop", "tuned_pi", "npc",
                       "reference_schedule", "duration", "dt", "seed", "model_path", "excitation"},
                   "scenario");

    std::string preset = "inductive";
    if (j.contains("grid") && j["grid"].is_string()) preset = j["grid"].get<std::string>();
    const auto controller = parse_controller(j.value("controller", std::string("pi_droop")));
    ScenarioConfig c = make_scenario(preset == "custom" ? "inductive" : preset, controller);

    if (j.contains("grid") && j["grid"].is_object()) {
      const auto& g = j["grid"];
      reject_unknown(g, {"v_grid_peak", "omega_nominal", "r_eq", "x_eq"}, "grid");
      c.grid_preset = "custom";
      read(g, "v_grid_peak", c.grid.v_grid_peak);
      read(g, "omega_nominal", c.grid.omega_nominal);
      read(g, "r_eq", c.grid.r_eq);
      read(g, "x_eq", c.grid.x_eq);
      c.pi_droop.v_ref = c.pi_droop.e_init = c.tuned_pi.v_ref = c.npc.v_ref = c.grid.v_grid_peak;
    }
    read(j, "name", c.name);
    read(j, "duration", c.duration);
    read(j, "dt", c.dt);
    read(j, "seed", c.seed);
    c.npc.dt = c.dt;
    if (j.contains("model_path")) {
      std::filesystem::path p = j["model_path"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      c.model_path = p.string();
    }
    if (j.contains("vsg")) {
      const auto& v = j["vsg"];
      reject_unknown(v, {"j_inertia", "d_p", "omega_ref", "p_rated"}, "vsg");
      read(v, "j_inertia", c.vsg.j_inertia);
      read(v, "d_p", c.vsg.d_p);
      read(v, "omega_ref", c.vsg.omega_ref);
      read(v, "p_rated", c.vsg.p_rated);
      c.npc.p_rated = c.vsg.p_rated;
    }
    if (j.contains("pi_droop")) {
      const auto& p = j["pi_droop"];
      reject_unknown(p, {"k_i", "d_v", "v_ref", "e_init"}, "pi_droop");
      read(p, "k_i", c.pi_droop.k_i);
      read(p, "d_v", c.pi_droop.d_v);
      read(p, "v_ref", c.pi_droop.v_ref);
      read(p, "e_init", c.pi_droop.e_init);
    }
    if (j.contains("tuned_pi")) {
      const auto& p = j["tuned_pi"];
      reject_unknown(p, {"k_p", "k_i", "mix_p", "v_ref"}, "tuned_pi");
      read(p, "k_p", c.tuned_pi.k_p);
      read(p, "k_i", c.tuned_pi.k_i);
      read(p, "mix_p", c.tuned_pi.mix_p);
      read(p, "v_ref", c.tuned_pi.v_ref);
    }
    if (j.contains("npc")) {
      const auto& p = j["npc"];
      reject_unknown(p, {"horizon_steps", "gamma", "candidate_set", "p_rated", "v_ref", "diagnostics"}, "npc");
      read(p, "horizon_steps", c.npc.horizon_steps);
      read(p, "gamma", c.npc.gamma);
      read(p, "candidate_set", c.npc.candidate_set);
      read(p, "p_rated", c.npc.p_rated);
      read(p, "v_ref", c.npc.v_ref);
      read(p, "diagnostics", c.npc_diagnostics);
    }
    if (j.contains("reference_schedule")) {
      c.reference_schedule.clear();
      for (const auto& e : j["reference_schedule"]) {
        reject_unknown(e, {"time", "p_set", "q_set"}, "reference_schedule entry");
        ScheduleEntry s;
        s.time = e.at("time").get<double>();
        read(e, "p_set", s.p_set);
        read(e, "q_set", s.q_set);
        c.reference_schedule.push_back(s);
      }
    }
    if (j.contains("excitation")) {
      const auto& x = j["excitation"];
      reject_unknown(x, {"p_set_range", "q_set_range", "dwell_range", "e_dither", "dither_hold_range"}, "excitation");
      read_range(x, "p_set_range", c.excitation.p_min, c.excitation.p_max);
      read_range(x, "q_set_range", c.excitation.q_min, c.excitation.q_max);
      read_range(x, "dwell_range", c.excitation.dwell_min, c.excitation.dwell_max);
      read(x, "e_dither", c.excitation.e_dither);
      read_range(x, "dither_hold_range", c.excitation.dither_hold_min, c.excitation.dither_hold_max);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(text::read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  if (c.grid_preset == "custom") {
    j["grid"] = {{"v_grid_peak", c.grid.v_grid_peak}, {"omega_nominal", c.grid.omega_nominal},
                 {"r_eq", c.grid.r_eq}, {"x_eq", c.grid.x_eq}};
  } else {
    j["grid"] = c.grid_preset;
  }
  j["controller"] = controller_name(c.controller);
  j["vsg"] = {{"j_inertia", c.vsg.j_inertia}, {"d_p", c.vsg.d_p},
              {"omega_ref", c.vsg.omega_ref}, {"p_rated", c.vsg.p_rated}};
  j["pi_droop"] = {{"k_i", c.pi_droop.k_i}, {"d_v", c.pi_droop.d_v},
                   {"v_ref", c.pi_droop.v_ref}, {"e_init", c.pi_droop.e_init}};
  j["tuned_pi"] = {{"k_p", c.tuned_pi.k_p}, {"k_i", c.tuned_pi.k_i},
                   {"mix_p", c.tuned_pi.mix_p}, {"v_ref", c.tuned_pi.v_ref}};
  j["npc"] = {{"horizon_steps", c.npc.horizon_steps}, {"gamma", c.npc.gamma},
              {"candidate_set", c.npc.candidate_set}, {"p_rated", c.npc.p_rated},
              {"v_ref", c.npc.v_ref}, {"diagnostics", c.npc_diagnostics}};
  json sched = json::array();
  for (const auto& e : c.reference_schedule) {
    sched.push_back({{"time", e.time}, {"p_set", e.p_set}, {"q_set", e.q_set}});
  }
  j["reference_schedule"] = sched;
  j["duration"] = c.duration;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  if (c.model_path) j["model_path"] = *c.model_path;
  j["excitation"] = {{"p_set_range", {c.excitation.p_min, c.excitation.p_max}},
                     {"q_set_range", {c.excitation.q_min, c.excitation.q_max}},
                     {"dwell_range", {c.excitation.dwell_min, c.excitation.dwell_max}},
                     {"e_dither", c.excitation.e_dither},
                     {"dither_hold_range", {c.excitation.dither_hold_min, c.excitation.dither_hold_max}}};
  return j.dump(2);
}

}  // namespace vsglab::harness
