#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vsglab/harness/metrics.hpp"

namespace vsglab::harness {

struct StepResult {
  StepEvent event;
  Metrics metrics;
};

// Metrics of one run over every reference step of its schedule.
struct ScenarioReport {
  std::string name;
  ControllerKind controller = ControllerKind::kPiDroop;
  std::vector<StepResult> steps;
  // Worst case over all steps of both channels. An unsettled step counts
  // with its full window length.
  double max_overshoot_pct = 0.0;
  double max_settling_time = 0.0;
  bool all_settled = true;
  double ise_p = 0.0;
  double ise_q = 0.0;
  double iae_p = 0.0;
  double iae_q = 0.0;
  std::size_t clamp_events = 0;
  std::size_t npc_warnings = 0;
  std::optional<std::string> fault;

  // Worst case restricted to one channel.
  double channel_max_overshoot(Channel c) const;
  double channel_max_settling(Channel c) const;
};

ScenarioReport summarize(const RunRecord& record, const ScenarioConfig& config);

struct ComparisonReport {
  std::vector<RunRecord> records;
  std::vector<ScenarioReport> scenarios;
};

// Throws ConfigError (mismatched-configs) unless all configs share grid,
// schedule, duration and dt.
void check_comparable(const std::vector<ScenarioConfig>& configs);

// Runs every config (concurrently; runs share nothing) and summarizes them.
// nets[i], when given and non-null, is used by an NPC scenario i instead of
// its model_path.
ComparisonReport compare(const std::vector<ScenarioConfig>& configs,
                         const std::vector<const nn::Mlp*>& nets = {});

std::string metrics_json(const std::vector<ScenarioReport>& scenarios);
std::string report_text(const std::vector<ScenarioReport>& scenarios);

// metrics.json, report.txt, P/Q overlay plots and one timeseries CSV per run
// (timeseries.csv for a single run, <name>_timeseries.csv otherwise).
void write_report(const std::vector<RunRecord>& records, const std::vector<ScenarioReport>& scenarios,
                  const std::string& dir);

}  // namespace vsglab::harness
