#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vsglab/harness/simulation.hpp"

namespace vsglab::harness {

enum class Channel { kP, kQ };

const char* channel_name(Channel c);

struct StepWindow {
  double t_step = 0.0;  // s, first sample carrying the new reference
  double t_end = 0.0;   // s, exclusive
};

struct Metrics {
  double step_magnitude = 0.0;
  bool degenerate = false;  // zero step: only the error integrals are defined
  std::optional<double> overshoot_pct;
  std::optional<double> settling_time;  // s after the step; window length if unsettled
  bool settled = false;
  std::optional<double> steady_state_error_pct;
  double ise = 0.0;            // unit^2 s
  double iae = 0.0;            // unit s
  double max_abs_error = 0.0;  // unit
};

inline constexpr double kSettlingBand = 0.02;

// Metrics for one channel over a window holding a single reference step.
// Throws InvalidParams if the reference changes again inside the window.
Metrics compute_metrics(const std::vector<RunRow>& rows, double dt, Channel channel,
                        const StepWindow& window);

inline Metrics compute_metrics(const RunRecord& record, Channel channel, const StepWindow& window) {
  return compute_metrics(record.rows, record.dt, channel, window);
}

// ISE / IAE of a channel over the whole record.
double integral_squared_error(const RunRecord& record, Channel channel);
double integral_absolute_error(const RunRecord& record, Channel channel);

struct StepEvent {
  Channel channel;
  StepWindow window;
  double from = 0.0;
  double to = 0.0;
};

// One event per schedule entry (after the first) and channel whose reference
// changes there. The window runs to the next schedule entry or `duration`.
std::vector<StepEvent> reference_steps(const std::vector<ScheduleEntry>& schedule, double duration);

// Every schedule entry (after the first), per channel, including entries where
// that channel's reference is unchanged (degenerate windows).
std::vector<StepEvent> schedule_windows(const std::vector<ScheduleEntry>& schedule, double duration,
                                        Channel channel);

}  // namespace vsglab::harness
