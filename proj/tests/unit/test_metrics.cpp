#include <doctest.h>

#include <cmath>
#include <functional>

#include "vsglab/errors.hpp"
#include "vsglab/harness/metrics.hpp"

using namespace vsglab;
using namespace vsglab::harness;

namespace {

constexpr double kDt = 1e-3;

// P reference steps from 0 to `to` at t = 1 s; p_out follows `response(t - 1)`
// afterwards and is 0 before.
RunRecord step_record(double to, double duration, const std::function<double(double)>& response) {
  RunRecord rec;
  rec.dt = kDt;
  const auto n = static_cast<std::size_t>(std::llround(duration / kDt));
  for (std::size_t k = 0; k <= n; ++k) {
    RunRow r;
    r.time = static_cast<double>(k) * kDt;
    const bool after = k >= 1000;
    r.p_set = after ? to : 0.0;
    r.p_out = after ? response(r.time - 1.0) : 0.0;
    rec.rows.push_back(r);
  }
  return rec;
}

}  // namespace

TEST_CASE("first-order response: 2 % settling at tau ln 50, no overshoot") {
  const double tau = 0.1;
  const auto rec = step_record(1000.0, 3.0, [&](double t) { return 1000.0 * (1.0 - std::exp(-t / tau)); });
  const auto m = compute_metrics(rec, Channel::kP, {1.0, 3.0});
  CHECK(m.step_magnitude == 1000.0);
  CHECK_FALSE(m.degenerate);
  REQUIRE(m.settling_time.has_value());
  CHECK(std::abs(*m.settling_time - tau * std::log(50.0)) <= kDt);
  CHECK(*m.settling_time == doctest::Approx(0.392).epsilon(1e-9));  // first sample inside the band
  CHECK(m.settled);
  CHECK(*m.overshoot_pct == 0.0);
  CHECK(*m.steady_state_error_pct < 1e-3);
}

TEST_CASE("constant error integrates exactly") {
  const double e0 = 40.0;
  const auto rec = step_record(1000.0, 3.0, [&](double) { return 1000.0 - e0; });
  const auto m = compute_metrics(rec, Channel::kP, {1.0, 3.0});
  CHECK(m.iae == doctest::Approx(e0 * 2.0).epsilon(1e-12));
  CHECK(m.ise == doctest::Approx(e0 * e0 * 2.0).epsilon(1e-12));
  CHECK(m.max_abs_error == e0);
  CHECK(*m.steady_state_error_pct == doctest::Approx(4.0));
  // 4 % off is outside the band for the whole window.
  CHECK_FALSE(m.settled);
  CHECK(*m.settling_time == doctest::Approx(2.0));
}

TEST_CASE("inside the band from the step means zero settling time") {
  const auto rec = step_record(1000.0, 2.0, [](double) { return 1010.0; });
  const auto m = compute_metrics(rec, Channel::kP, {1.0, 2.0});
  CHECK(*m.settling_time == 0.0);
  CHECK(m.settled);
  CHECK(*m.overshoot_pct == doctest::Approx(1.0));
}

TEST_CASE("overshoot is the peak excursion over the step magnitude") {
  const auto rec = step_record(2000.0, 4.0, [](double t) {
    return 2000.0 * (1.0 - std::exp(-3.0 * t) * std::cos(10.0 * t));
  });
  const auto m = compute_metrics(rec, Channel::kP, {1.0, 4.0});
  // Brute-force peak on the same grid.
  double peak = 0.0;
  for (const auto& r : rec.rows) {
    if (r.time >= 1.0) peak = std::max(peak, r.p_out - 2000.0);
  }
  CHECK(*m.overshoot_pct == doctest::Approx(100.0 * peak / 2000.0));
  CHECK(*m.overshoot_pct > 30.0);
  CHECK(m.settled);
}

TEST_CASE("negative steps use the step magnitude") {
  RunRecord rec;
  rec.dt = kDt;
  for (int k = 0; k <= 2000; ++k) {
    RunRow r;
    r.time = k * kDt;
    r.q_set = k >= 1000 ? -500.0 : 0.0;
    r.q_out = k >= 1000 ? -550.0 : 0.0;
    rec.rows.push_back(r);
  }
  const auto m = compute_metrics(rec, Channel::kQ, {1.0, 2.0});
  CHECK(m.step_magnitude == -500.0);
  CHECK(*m.overshoot_pct == doctest::Approx(10.0));
}

TEST_CASE("degenerate windows report only error integrals") {
  const auto rec = step_record(1000.0, 3.0, [](double) { return 990.0; });
  const auto m = compute_metrics(rec, Channel::kP, {1.5, 3.0});
  CHECK(m.degenerate);
  CHECK_FALSE(m.overshoot_pct.has_value());
  CHECK_FALSE(m.settling_time.has_value());
  CHECK(m.ise == doctest::Approx(100.0 * 1.5).epsilon(1e-12));
  const auto q = compute_metrics(rec, Channel::kQ, {1.0, 3.0});
  CHECK(q.degenerate);
  CHECK(q.ise == 0.0);
}

TEST_CASE("windows must hold one step") {
  const auto rec = step_record(1000.0, 3.0, [](double) { return 1000.0; });
  CHECK_THROWS_AS(compute_metrics(rec, Channel::kP, {0.5, 3.0}), InvalidParams);
  CHECK_THROWS_AS(compute_metrics(rec, Channel::kP, {5.0, 6.0}), InvalidParams);
}

TEST_CASE("metrics are non-negative") {
  const auto rec = step_record(1500.0, 3.0, [](double t) { return 1500.0 * (1.0 - std::exp(-t / 0.3)); });
  const auto m = compute_metrics(rec, Channel::kP, {1.0, 3.0});
  CHECK(*m.overshoot_pct >= 0.0);
  CHECK(*m.settling_time >= 0.0);
  CHECK(*m.settling_time <= 2.0);
  CHECK(m.ise >= 0.0);
  CHECK(m.iae >= 0.0);
}

TEST_CASE("whole-record integrals") {
  const auto rec = step_record(1000.0, 2.0, [](double) { return 1000.0; });
  // Only the first second carries error 0: zero everywhere.
  CHECK(integral_squared_error(rec, Channel::kP) == 0.0);
  const auto off = step_record(1000.0, 2.0, [](double) { return 990.0; });
  CHECK(integral_absolute_error(off, Channel::kP) == doctest::Approx(10.0 * 1001 * kDt).epsilon(1e-12));
}

TEST_CASE("reference steps of the headline schedule") {
  const auto steps = reference_steps(headline_schedule(), 25.0);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].channel == Channel::kP);
  CHECK(steps[0].window.t_step == 1.0);
  CHECK(steps[0].window.t_end == 8.0);
  CHECK(steps[0].to == 2000.0);
  CHECK(steps[1].from == 2000.0);
  CHECK(steps[1].to == 4000.0);
  CHECK(steps[2].channel == Channel::kQ);
  CHECK(steps[2].window.t_step == 15.0);
  CHECK(steps[2].window.t_end == 25.0);
  const auto q_windows = schedule_windows(headline_schedule(), 25.0, Channel::kQ);
  CHECK(q_windows.size() == 3);
  CHECK(q_windows[0].from == q_windows[0].to);
}
