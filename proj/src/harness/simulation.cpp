#include "vsglab/harness/simulation.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "vsglab/errors.hpp"
#include "vsglab/npc.hpp"
#include "vsglab/random.hpp"
#include "vsglab/text_io.hpp"

namespace vsglab::harness {
namespace {

struct Measurement {
  double p_out;
  double q_out;
};

Measurement measure(const ScenarioConfig& c, double e, double delta) {
  const auto s = grid::power_flow_exact(e, c.grid, delta);
  return {s.p_total(), s.q_total()};
}

// Voltage-loop state for whichever controller the scenario selects.
class VoltageLoop {
 public:
  VoltageLoop(const ScenarioConfig& c, const nn::Mlp* net) : c_(c), net_(net) {
    pi_ = control::PiDroopState::initial(c.pi_droop);
    e_ = c.controller == ControllerKind::kPiDroop ? c.pi_droop.e_init : c.grid.v_grid_peak;
    npc_.e_cmd = e_;
  }

  double e() const { return e_; }

  double step(const Measurement& m, const ScheduleEntry& ref, const vsg::VsgState& s) {
    switch (c_.controller) {
      case ControllerKind::kPiDroop: {
        const auto out = control::pi_droop_step(pi_, ref.q_set, m.q_out, e_, c_.pi_droop, c_.dt);
        pi_ = out.state;
        e_ = out.e_cmd;
        break;
      }
      case ControllerKind::kTunedPi: {
        const auto out = control::tuned_pi_step(tuned_, ref.q_set, m.q_out, ref.p_set, m.p_out,
                                                c_.tuned_pi, c_.dt);
        tuned_ = out.state;
        e_ = out.e_cmd;
        break;
      }
      case ControllerKind::kNpc: {
        nn::PlantOutputVec y{m.p_out, m.q_out, ref.p_set - m.p_out, ref.q_set - m.q_out,
                             s.omega_i - c_.vsg.omega_ref, s.delta};
        e_ = npc::npc_step(npc_, *net_, y, {ref.p_set, ref.q_set}, c_.npc);
        break;
      }
    }
    return e_;
  }

  // Overrides the applied command (excitation dither).
  void force(double e) {
    e_ = e;
    npc_.e_cmd = e;
  }

  std::uint64_t clamp_events() const { return pi_.clamp_events + tuned_.clamp_events; }
  const npc::NpcState& npc_state() const { return npc_; }

 private:
  const ScenarioConfig& c_;
  const nn::Mlp* net_;
  double e_ = 0.0;
  control::PiDroopState pi_;
  control::TunedPiState tuned_;
  npc::NpcState npc_;
};

}  // namespace

RunRecord run_scenario(const ScenarioConfig& config, const nn::Mlp* net) {
  config.validate();
  std::unique_ptr<nn::Mlp> loaded;
  if (config.controller == ControllerKind::kNpc && net == nullptr) {
    loaded = std::make_unique<nn::Mlp>(nn::load_model(*config.model_path));
    net = loaded.get();
  }

  RunRecord rec;
  rec.name = config.name;
  rec.controller = config.controller;
  rec.dt = config.dt;
  if (config.controller == ControllerKind::kNpc) rec.candidate_set = config.npc.candidate_set;

  const std::size_t n = config.steps();
  rec.rows.reserve(n + 1);
  vsg::VsgState state = vsg::VsgState::synchronized(config.vsg);
  VoltageLoop loop(config, net);

  try {
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) * config.dt;
      const ScheduleEntry ref = config.reference_at(t);
      const Measurement m = measure(config, loop.e(), state.delta);
      if (!std::isfinite(m.p_out) || !std::isfinite(m.q_out)) throw NumericFault("non-finite power");
      rec.rows.push_back({t, loop.e(), state.omega_i, state.delta, m.p_out, m.q_out, ref.p_set, ref.q_set});
      if (k == n) break;

      loop.step(m, ref, state);
      if (config.controller == ControllerKind::kNpc && config.npc_diagnostics) {
        NpcDiagnostic d;
        d.time = t;
        for (const auto& r : loop.npc_state().last.candidates) d.costs.push_back(r.cost);
        d.chosen = loop.npc_state().last.delta_u;
        rec.diagnostics.push_back(std::move(d));
      }
      state = vsg::swing_step(state, ref.p_set, m.p_out, config.vsg, config.grid.omega_nominal, config.dt);
    }
  } catch (const NumericFault& e) {
    rec.fault = e.what();
  } catch (const nn::NonFiniteOutput& e) {
    rec.fault = e.what();
  }
  rec.clamp_events = loop.clamp_events();
  rec.npc_warnings = loop.npc_state().all_divergent_warnings;
  return rec;
}

nn::Dataset collect_dataset(const ScenarioConfig& base, double duration, std::uint64_t seed) {
  if (base.controller == ControllerKind::kNpc) {
    throw ConfigError("data collection needs a PI-family controller");
  }
  if (!(duration >= 0.0)) throw ConfigError("duration must be non-negative");
  ScenarioConfig config = base;
  config.duration = duration;
  config.validate();

  nn::Dataset data;
  data.metadata.dt = config.dt;
  data.metadata.seed = seed;
  data.metadata.scenario = config.name;

  const auto& x = config.excitation;
  Rng rng(seed);
  vsg::VsgState state = vsg::VsgState::synchronized(config.vsg);
  VoltageLoop loop(config, nullptr);

  ScheduleEntry ref;
  double next_change = 0.0;
  std::int64_t episode = -1;

  double dither = 0.0;
  double next_dither = 0.0;

  const std::size_t n = config.steps();
  bool have_prev = false;
  nn::Sample pending;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    if (t >= next_change - 1e-9 * config.dt) {
      ref.p_set = rng.uniform(x.p_min, x.p_max);
      ref.q_set = rng.uniform(x.q_min, x.q_max);
      next_change = t + rng.uniform(x.dwell_min, x.dwell_max);
      ++episode;
    }
    const Measurement m = measure(config, loop.e(), state.delta);
    const nn::PlantOutputVec y{m.p_out, m.q_out, ref.p_set - m.p_out, ref.q_set - m.q_out,
                               state.omega_i - config.vsg.omega_ref, state.delta};
    if (have_prev && pending.episode == episode) {
      pending.target = y.to_array();
      data.rows.push_back(pending);
    }

    double e = loop.step(m, ref, state);
    if (x.e_dither > 0.0) {
      if (t >= next_dither - 1e-9 * config.dt) {
        dither = rng.uniform(-x.e_dither, x.e_dither);
        next_dither = t + (x.dither_hold_min == x.dither_hold_max
                               ? x.dither_hold_min
                               : rng.uniform(x.dither_hold_min, x.dither_hold_max));
      }
      e = control::clamp_voltage(e + dither, config.grid.v_grid_peak);
      loop.force(e);
    }
    pending.input = nn::make_input(y, e);
    pending.episode = episode;
    have_prev = true;
    state = vsg::swing_step(state, ref.p_set, m.p_out, config.vsg, config.grid.omega_nominal, config.dt);
  }
  return data;
}

// ---------------------------------------------------------------------------
// CSV

namespace {
const char* kTimeseriesHeader = "time,e_cmd,omega_i,delta,p_out,q_out,p_set,q_set,p_err,q_err";
}

std::string timeseries_csv(const RunRecord& record) {
  std::ostringstream out;
  out << kTimeseriesHeader << '\n';
  using text::format_double;
  for (const auto& r : record.rows) {
    out << format_double(r.time) << ',' << format_double(r.e_cmd) << ',' << format_double(r.omega_i)
        << ',' << format_double(r.delta) << ',' << format_double(r.p_out) << ','
        << format_double(r.q_out) << ',' << format_double(r.p_set) << ',' << format_double(r.q_set)
        << ',' << format_double(r.p_set - r.p_out) << ',' << format_double(r.q_set - r.q_out) << '\n';
  }
  return out.str();
}

void write_timeseries_csv(const RunRecord& record, const std::string& path) {
  text::write_file(path, timeseries_csv(record));
}

std::vector<RunRow> read_timeseries_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader) throw IoError(path + ": unexpected header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = text::split(line, ',');
    if (c.size() != 10) throw IoError(path + ": expected 10 columns");
    rows.push_back({text::parse_double(c[0]), text::parse_double(c[1]), text::parse_double(c[2]),
                    text::parse_double(c[3]), text::parse_double(c[4]), text::parse_double(c[5]),
                    text::parse_double(c[6]), text::parse_double(c[7])});
  }
  return rows;
}

std::string diagnostics_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "time";
  for (double c : record.candidate_set) out << ",cost_" << text::format_double(c);
  out << ",chosen\n";
  for (const auto& d : record.diagnostics) {
    out << text::format_double(d.time);
    for (double cost : d.costs) out << ',' << (std::isfinite(cost) ? text::format_double(cost) : "inf");
    out << ',' << text::format_double(d.chosen) << '\n';
  }
  return out.str();
}

void write_diagnostics_csv(const RunRecord& record, const std::string& path) {
  text::write_file(path, diagnostics_csv(record));
}

}  // namespace vsglab::harness
