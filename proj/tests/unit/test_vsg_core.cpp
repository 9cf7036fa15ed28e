#include <doctest.h>

#include <cmath>
#include <limits>

#include "vsglab/errors.hpp"
#include "vsglab/grid_plant.hpp"
#include "vsglab/vsg_core.hpp"

using namespace vsglab;
using namespace vsglab::vsg;

TEST_CASE("defaults") {
  const auto p = VsgParams::defaults();
  CHECK(p.j_inertia == 0.1);
  CHECK(p.p_rated == 5000.0);
  CHECK(p.omega_ref == doctest::Approx(2.0 * grid::kPi * 60.0));
  // 4 % frequency droop delivers rated power.
  CHECK(p.d_p * 0.04 * p.omega_ref == doctest::Approx(p.p_rated));
  CHECK(droop_damping(5000.0, 100.0, 0.05) == doctest::Approx(1000.0));
}

TEST_CASE("equilibrium is a fixed point") {
  const auto p = VsgParams::defaults();
  const auto s0 = VsgState::synchronized(p);
  const auto s1 = swing_step(s0, 2000.0, 2000.0, p, p.omega_ref, 1e-3);
  CHECK(s1.omega_i == s0.omega_i);
  CHECK(s1.delta == s0.delta);
  CHECK(s1.theta == doctest::Approx(p.omega_ref * 1e-3));
}

TEST_CASE("damping balances a power mismatch") {
  const auto p = VsgParams::defaults();
  VsgState s{p.omega_ref + 0.5, 0.0, 0.1};
  const double p_out = 1000.0;
  const double p_set = p_out + p.d_p * 0.5;
  CHECK(swing_acceleration(s, p_set, p_out, p) == doctest::Approx(0.0));
}

TEST_CASE("single step with a 1 kW mismatch") {
  VsgParams p = VsgParams::defaults();
  p.omega_ref = 376.99;
  VsgState s{376.99, 0.0, 0.0};
  const auto next = swing_step(s, 1000.0, 0.0, p, 376.99, 1e-3);
  const double dw = next.omega_i - s.omega_i;
  CHECK(dw == doctest::Approx(0.02653).epsilon(1e-3));
  CHECK(dw == doctest::Approx(1000.0 / (0.1 * 376.99) * 1e-3).epsilon(1e-12));
  // Angles use the advanced velocity.
  CHECK(next.delta == doctest::Approx(dw * 1e-3).epsilon(1e-12));
  CHECK(next.theta == doctest::Approx(next.omega_i * 1e-3).epsilon(1e-12));
}

TEST_CASE("velocity collapse is a numeric fault") {
  const auto p = VsgParams::defaults();
  VsgState s{1e-3, 0.0, 0.0};
  CHECK_THROWS_AS(swing_step(s, -1e9, 0.0, p, p.omega_ref, 1e-3), NumericFault);
  VsgState bad{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  CHECK_THROWS_AS(swing_step(bad, 0.0, 0.0, p, p.omega_ref, 1e-3), NumericFault);
}

TEST_CASE("parameter validation") {
  VsgParams p = VsgParams::defaults();
  p.j_inertia = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = VsgParams::defaults();
  p.d_p = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
}

TEST_CASE("closed loop against the plant reaches p_out = p_set") {
  const auto p = VsgParams::defaults();
  const auto g = grid::inductive_preset();
  auto s = VsgState::synchronized(p);
  for (int k = 0; k < 20000; ++k) {
    const double p_out = grid::power_flow_exact(g.v_grid_peak, g, s.delta).p_total();
    s = swing_step(s, 2000.0, p_out, p, g.omega_nominal, 1e-3);
  }
  CHECK(grid::power_flow_exact(g.v_grid_peak, g, s.delta).p_total() == doctest::Approx(2000.0).epsilon(1e-6));
  CHECK(s.omega_i == doctest::Approx(p.omega_ref).epsilon(1e-9));
}
