#include "vsglab/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vsglab/errors.hpp"

namespace vsglab::harness {
namespace {

double output_of(const RunRow& r, Channel c) { return c == Channel::kP ? r.p_out : r.q_out; }
double reference_of(const RunRow& r, Channel c) { return c == Channel::kP ? r.p_set : r.q_set; }
double reference_of(const ScheduleEntry& e, Channel c) { return c == Channel::kP ? e.p_set : e.q_set; }

}  // namespace

const char* channel_name(Channel c) { return c == Channel::kP ? "P" : "Q"; }

Metrics compute_metrics(const std::vector<RunRow>& rows, double dt, Channel channel,
                        const StepWindow& window) {
  const double eps = 1e-9 * dt;
  auto first = std::find_if(rows.begin(), rows.end(),
                            [&](const RunRow& r) { return r.time >= window.t_step - eps; });
  auto last = std::find_if(first, rows.end(), [&](const RunRow& r) { return r.time >= window.t_end - eps; });
  if (first == last) throw InvalidParams("metric window contains no samples");

  const double r1 = reference_of(*first, channel);
  const double r0 = first == rows.begin() ? r1 : reference_of(*(first - 1), channel);
  for (auto it = first; it != last; ++it) {
    if (reference_of(*it, channel) != r1) throw InvalidParams("metric window spans more than one reference step");
  }

  Metrics m;
  m.step_magnitude = r1 - r0;
  for (auto it = first; it != last; ++it) {
    const double err = reference_of(*it, channel) - output_of(*it, channel);
    m.ise += err * err * dt;
    m.iae += std::abs(err) * dt;
    m.max_abs_error = std::max(m.max_abs_error, std::abs(err));
  }
  if (m.step_magnitude == 0.0) {
    m.degenerate = true;
    return m;
  }

  const double mag = std::abs(m.step_magnitude);
  const double sign = m.step_magnitude > 0.0 ? 1.0 : -1.0;
  double peak = 0.0;
  for (auto it = first; it != last; ++it) peak = std::max(peak, sign * (output_of(*it, channel) - r1));
  m.overshoot_pct = 100.0 * peak / mag;

  const double band = kSettlingBand * mag;
  auto last_out = last;
  for (auto it = first; it != last; ++it) {
    if (std::abs(output_of(*it, channel) - r1) > band) last_out = it;
  }
  const double length = (last - 1)->time - first->time + dt;
  if (last_out == last) {
    m.settling_time = 0.0;
    m.settled = true;
  } else if (last_out + 1 == last) {
    m.settling_time = length;
    m.settled = false;
  } else {
    m.settling_time = (last_out + 1)->time - first->time;
    m.settled = true;
  }

  const auto count = static_cast<std::size_t>(last - first);
  const std::size_t tail = std::max<std::size_t>(1, count / 10);
  double mean = 0.0;
  for (auto it = last - static_cast<std::ptrdiff_t>(tail); it != last; ++it) mean += output_of(*it, channel);
  mean /= static_cast<double>(tail);
  m.steady_state_error_pct = 100.0 * std::abs(mean - r1) / mag;
  return m;
}

double integral_squared_error(const RunRecord& record, Channel channel) {
  double acc = 0.0;
  for (const auto& r : record.rows) {
    const double e = reference_of(r, channel) - output_of(r, channel);
    acc += e * e * record.dt;
  }
  return acc;
}

double integral_absolute_error(const RunRecord& record, Channel channel) {
  double acc = 0.0;
  for (const auto& r : record.rows) acc += std::abs(reference_of(r, channel) - output_of(r, channel)) * record.dt;
  return acc;
}

std::vector<StepEvent> schedule_windows(const std::vector<ScheduleEntry>& schedule, double duration,
                                        Channel channel) {
  std::vector<StepEvent> out;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].time >= duration) break;
    const double end = i + 1 < schedule.size() ? std::min(schedule[i + 1].time, duration) : duration;
    out.push_back({channel, {schedule[i].time, end}, reference_of(schedule[i - 1], channel),
                   reference_of(schedule[i], channel)});
  }
  return out;
}

std::vector<StepEvent> reference_steps(const std::vector<ScheduleEntry>& schedule, double duration) {
  std::vector<StepEvent> out;
  for (Channel ch : {Channel::kP, Channel::kQ}) {
    for (const auto& ev : schedule_windows(schedule, duration, ch)) {
      if (ev.from != ev.to) out.push_back(ev);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const StepEvent& a, const StepEvent& b) { return a.window.t_step < b.window.t_step; });
  return out;
}

}  // namespace vsglab::harness
