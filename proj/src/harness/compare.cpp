#include "vsglab/harness/compare.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vsglab/errors.hpp"
#include "vsglab/harness/plots.hpp"
#include "vsglab/text_io.hpp"

namespace vsglab::harness {

double ScenarioReport::channel_max_overshoot(Channel c) const {
  double worst = 0.0;
  for (const auto& s : steps) {
    if (s.event.channel == c && s.metrics.overshoot_pct) worst = std::max(worst, *s.metrics.overshoot_pct);
  }
  return worst;
}

double ScenarioReport::channel_max_settling(Channel c) const {
  double worst = 0.0;
  for (const auto& s : steps) {
    if (s.event.channel == c && s.metrics.settling_time) worst = std::max(worst, *s.metrics.settling_time);
  }
  return worst;
}

ScenarioReport summarize(const RunRecord& record, const ScenarioConfig& config) {
  ScenarioReport rep;
  rep.name = record.name;
  rep.controller = record.controller;
  rep.clamp_events = record.clamp_events;
  rep.npc_warnings = record.npc_warnings;
  rep.fault = record.fault;
  for (const auto& ev : reference_steps(config.reference_schedule, config.duration)) {
    // A faulted run may end before the step.
    if (record.rows.empty() || record.rows.back().time < ev.window.t_step) {
      rep.all_settled = false;
      continue;
    }
    StepResult sr{ev, compute_metrics(record, ev.channel, ev.window)};
    rep.max_overshoot_pct = std::max(rep.max_overshoot_pct, sr.metrics.overshoot_pct.value_or(0.0));
    rep.max_settling_time = std::max(rep.max_settling_time, sr.metrics.settling_time.value_or(0.0));
    rep.all_settled = rep.all_settled && sr.metrics.settled;
    rep.steps.push_back(std::move(sr));
  }
  rep.ise_p = integral_squared_error(record, Channel::kP);
  rep.ise_q = integral_squared_error(record, Channel::kQ);
  rep.iae_p = integral_absolute_error(record, Channel::kP);
  rep.iae_q = integral_absolute_error(record, Channel::kQ);
  return rep;
}

void check_comparable(const std::vector<ScenarioConfig>& configs) {
  if (configs.empty()) throw ConfigError("mismatched-configs: nothing to compare");
  const auto& a = configs.front();
  for (const auto& b : configs) {
    auto fail = [&](const std::string& what) {
      throw ConfigError("mismatched-configs: '" + b.name + "' differs from '" + a.name + "' in " + what);
    };
    if (b.grid_preset != a.grid_preset || b.grid.r_eq != a.grid.r_eq || b.grid.x_eq != a.grid.x_eq ||
        b.grid.v_grid_peak != a.grid.v_grid_peak || b.grid.omega_nominal != a.grid.omega_nominal) {
      fail("grid");
    }
    if (b.duration != a.duration) fail("duration");
    if (b.dt != a.dt) fail("dt");
    if (b.reference_schedule.size() != a.reference_schedule.size()) fail("reference schedule");
    for (std::size_t i = 0; i < a.reference_schedule.size(); ++i) {
      const auto& x = a.reference_schedule[i];
      const auto& y = b.reference_schedule[i];
      if (x.time != y.time || x.p_set != y.p_set || x.q_set != y.q_set) fail("reference schedule");
    }
  }
}

ComparisonReport compare(const std::vector<ScenarioConfig>& configs, const std::vector<const nn::Mlp*>& nets) {
  check_comparable(configs);
  for (const auto& c : configs) c.validate();
  std::vector<std::future<RunRecord>> runs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const nn::Mlp* net = i < nets.size() ? nets[i] : nullptr;
    runs.push_back(std::async(std::launch::async, [&configs, i, net] { return run_scenario(configs[i], net); }));
  }
  ComparisonReport out;
  for (auto& f : runs) out.records.push_back(f.get());
  for (std::size_t i = 0; i < configs.size(); ++i) out.scenarios.push_back(summarize(out.records[i], configs[i]));
  return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string metrics_json(const std::vector<ScenarioReport>& scenarios) {
  ordered_json root;
  ordered_json list = ordered_json::array();
  for (const auto& s : scenarios) {
    ordered_json j;
    j["name"] = s.name;
    j["controller"] = controller_name(s.controller);
    ordered_json steps = ordered_json::array();
    for (const auto& st : s.steps) {
      const auto& m = st.metrics;
      steps.push_back({{"channel", channel_name(st.event.channel)},
                       {"t_step", st.event.window.t_step},
                       {"t_end", st.event.window.t_end},
                       {"from", st.event.from},
                       {"to", st.event.to},
                       {"overshoot_pct", optional_number(m.overshoot_pct)},
                       {"settling_time", optional_number(m.settling_time)},
                       {"settled", m.settled},
                       {"steady_state_error_pct", optional_number(m.steady_state_error_pct)},
                       {"ise", m.ise},
                       {"iae", m.iae},
                       {"max_abs_error", m.max_abs_error}});
    }
    j["steps"] = steps;
    j["summary"] = {{"max_overshoot_pct", s.max_overshoot_pct},
                    {"max_settling_time", s.max_settling_time},
                    {"all_settled", s.all_settled},
                    {"ise_p", s.ise_p},
                    {"ise_q", s.ise_q},
                    {"iae_p", s.iae_p},
                    {"iae_q", s.iae_q}};
    j["clamp_events"] = s.clamp_events;
    j["npc_warnings"] = s.npc_warnings;
    j["fault"] = s.fault ? ordered_json(*s.fault) : ordered_json(nullptr);
    list.push_back(j);
  }
  root["scenarios"] = list;
  if (scenarios.size() > 1) {
    const auto& base = scenarios.front();
    ordered_json deltas = ordered_json::array();
    for (std::size_t i = 1; i < scenarios.size(); ++i) {
      const auto& s = scenarios[i];
      deltas.push_back({{"name", s.name},
                        {"baseline", base.name},
                        {"max_overshoot_pct", s.max_overshoot_pct - base.max_overshoot_pct},
                        {"max_settling_time", s.max_settling_time - base.max_settling_time},
                        {"ise_p", s.ise_p - base.ise_p},
                        {"ise_q", s.ise_q - base.ise_q}});
    }
    root["deltas"] = deltas;
  }
  return root.dump(2) + "\n";
}

std::string report_text(const std::vector<ScenarioReport>& scenarios) {
  std::ostringstream out;
  out << std::fixed;
  auto cell = [&](const std::string& s) { out << std::setw(16) << s; };
  auto num = [](double v, int prec) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << v;
    return o.str();
  };

  out << std::left << std::setw(28) << "metric" << std::right;
  for (const auto& s : scenarios) cell(s.name.substr(0, 15));
  out << "\n";
  auto row = [&](const std::string& label, auto value) {
    out << std::left << std::setw(28) << label << std::right;
    for (const auto& s : scenarios) cell(value(s));
    out << "\n";
  };
  row("controller", [](const ScenarioReport& s) { return std::string(controller_name(s.controller)); });
  row("max overshoot [%]", [&](const ScenarioReport& s) { return num(s.max_overshoot_pct, 2); });
  row("max settling [s]", [&](const ScenarioReport& s) {
    return num(s.max_settling_time, 3) + (s.all_settled ? "" : "*");
  });
  row("ISE P [W^2 s]", [&](const ScenarioReport& s) { return num(s.ise_p, 0); });
  row("ISE Q [var^2 s]", [&](const ScenarioReport& s) { return num(s.ise_q, 0); });
  row("IAE P [W s]", [&](const ScenarioReport& s) { return num(s.iae_p, 1); });
  row("IAE Q [var s]", [&](const ScenarioReport& s) { return num(s.iae_q, 1); });
  row("clamp events", [](const ScenarioReport& s) { return std::to_string(s.clamp_events); });
  row("npc warnings", [](const ScenarioReport& s) { return std::to_string(s.npc_warnings); });

  if (!scenarios.empty()) {
    const auto& steps = scenarios.front().steps;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& ev = steps[k].event;
      out << "\nstep " << channel_name(ev.channel) << " " << num(ev.from, 0) << " -> " << num(ev.to, 0) << " at t="
          << num(ev.window.t_step, 3) << " s\n";
      auto step_row = [&](const std::string& label, auto value) {
        out << std::left << std::setw(28) << ("  " + label) << std::right;
        for (const auto& s : scenarios) cell(k < s.steps.size() ? value(s.steps[k].metrics) : std::string("-"));
        out << "\n";
      };
      step_row("overshoot [%]", [&](const Metrics& m) { return num(m.overshoot_pct.value_or(0.0), 2); });
      step_row("settling [s]", [&](const Metrics& m) {
        return num(m.settling_time.value_or(0.0), 3) + (m.settled ? "" : "*");
      });
      step_row("steady-state err [%]", [&](const Metrics& m) { return num(m.steady_state_error_pct.value_or(0.0), 2); });
      step_row("ISE", [&](const Metrics& m) { return num(m.ise, 0); });
    }
  }

  if (scenarios.size() > 1) {
    const auto& base = scenarios.front();
    out << "\ndeltas vs " << base.name << "\n";
    row("max overshoot [%]", [&](const ScenarioReport& s) { return num(s.max_overshoot_pct - base.max_overshoot_pct, 2); });
    row("max settling [s]", [&](const ScenarioReport& s) { return num(s.max_settling_time - base.max_settling_time, 3); });
    row("ISE P", [&](const ScenarioReport& s) { return num(s.ise_p - base.ise_p, 0); });
    row("ISE Q", [&](const ScenarioReport& s) { return num(s.ise_q - base.ise_q, 0); });
  }
  for (const auto& s : scenarios) {
    if (s.fault) out << "\n" << s.name << " stopped early: " << *s.fault << "\n";
  }
  out << "\n* = not settled inside the window (settling reported as window length)\n";
  return out.str();
}

void write_report(const std::vector<RunRecord>& records, const std::vector<ScenarioReport>& scenarios,
                  const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir);
  const fs::path root(dir);
  text::write_file((root / "metrics.json").string(), metrics_json(scenarios));
  text::write_file((root / "report.txt").string(), report_text(scenarios));
  std::vector<const RunRecord*> ptrs;
  for (const auto& r : records) {
    ptrs.push_back(&r);
    const std::string file = records.size() == 1 ? "timeseries.csv" : r.name + "_timeseries.csv";
    write_timeseries_csv(r, (root / file).string());
    if (!r.diagnostics.empty()) {
      const std::string diag = records.size() == 1 ? "diagnostics.csv" : r.name + "_diagnostics.csv";
      write_diagnostics_csv(r, (root / diag).string());
    }
  }
  if (!ptrs.empty() && !ptrs.front()->rows.empty()) emit_plots(ptrs, {Channel::kP, Channel::kQ}, dir);
}

}  // namespace vsglab::harness
