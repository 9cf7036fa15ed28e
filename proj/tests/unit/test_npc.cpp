#include <doctest.h>

#include <cmath>
#include <limits>

#include "vsglab/npc.hpp"
#include "vsglab/random.hpp"

using namespace vsglab;
using namespace vsglab::npc;
using nn::Mlp;
using nn::PlantOutputVec;

namespace {

// Trained-looking network whose next-step prediction is
//   p_next = p_out + a * (e - e0),  q_next = q_out + b * (e - e0)
// (one linear layer in increment mode).
Mlp linear_plant(double a, double b, double e0) {
  Mlp net({7, 6}, nn::TargetMode::kIncrement);
  auto& l = net.layers()[0];
  l.w(0, 6) = a;
  l.w(1, 6) = b;
  l.bias[0] = -a * e0;
  l.bias[1] = -b * e0;
  net.output_min.assign(6, -1e4);
  net.output_max.assign(6, 1e4);
  net.training.trained = true;
  return net;
}

NpcParams params(std::size_t horizon) {
  NpcParams p;
  p.horizon_steps = horizon;
  p.v_ref = 90.0;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  auto p = params(10);
  CHECK_NOTHROW(p.validate());
  p.candidate_set = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = params(0);
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  CHECK(params(1).candidate_set.size() == 9);
}

TEST_CASE("untrained networks are refused") {
  Mlp net;
  CHECK_THROWS_AS(rollout_cost(net, {}, 90.0, 0.0, {}, params(3)), InvalidParams);
}

TEST_CASE("zero increment at exact tracking costs nothing") {
  const auto net = linear_plant(100.0, 50.0, 90.0);
  const PlantOutputVec y{2000.0, 500.0, 0, 0, 0, 0};
  const auto r = rollout_cost(net, y, 90.0, 0.0, {2000.0, 500.0}, params(20));
  CHECK(r.cost == 0.0);
  CHECK_FALSE(r.diverged);
}

TEST_CASE("single-step horizon is the squared error of one forward pass") {
  const auto net = Mlp::initialized(Mlp::default_dims(), nn::TargetMode::kAbsolute, 4);
  Mlp trained = net;
  trained.training.trained = true;
  trained.output_min.assign(6, -1e9);
  trained.output_max.assign(6, 1e9);
  const PlantOutputVec y{0.3, -0.2, 0.1, 0.4, 0.0, 0.01};
  const References refs{0.5, 0.25};
  auto p = params(1);
  p.gamma = 0.7;
  const double e = 1.2;
  const double du = 0.2;
  PlantOutputVec y_err = y;
  y_err.refresh_errors(refs.p_set, refs.q_set);
  const auto next = nn::mlp_forward(trained, nn::make_input(y_err, e + du));
  const double want = (std::pow(refs.p_set - next[0], 2) + std::pow(refs.q_set - next[1], 2)) /
                          (p.p_rated * p.p_rated) +
                      p.gamma * du * du;
  CHECK(rollout_cost(trained, y, e, du, refs, p).cost == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("held increment is applied over the whole horizon") {
  const auto net = linear_plant(10.0, 0.0, 90.0);
  auto p = params(5);
  p.retain_trajectories = true;
  const auto r = rollout_cost(net, {}, 90.0, 1.0, {0.0, 0.0}, p);
  REQUIRE(r.trajectory.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.trajectory[i].p_out == doctest::Approx(10.0 * (i + 1)));
}

TEST_CASE("a large control penalty selects zero") {
  const auto net = linear_plant(100.0, 0.0, 90.0);
  const PlantOutputVec y{0.0, 0.0, 0, 0, 0, 0};
  auto p = params(10);
  p.gamma = 0.0;
  const auto free = select_control(net, y, 90.0, {3000.0, 0.0}, p);
  CHECK(free.delta_u != 0.0);
  p.gamma = 1e6;
  const auto penalized = select_control(net, y, 90.0, {3000.0, 0.0}, p);
  CHECK(penalized.delta_u == 0.0);
}

TEST_CASE("equal finite costs resolve to zero") {
  Mlp flat({7, 6}, nn::TargetMode::kIncrement);
  flat.training.trained = true;
  const auto sel = select_control(flat, {1.0, 2.0, 0, 0, 0, 0}, 90.0, {5.0, 5.0}, params(4));
  CHECK(sel.delta_u == 0.0);
  CHECK_FALSE(sel.all_divergent);
}

TEST_CASE("ties prefer the smaller magnitude, then the earlier candidate") {
  Mlp flat({7, 6}, nn::TargetMode::kIncrement);
  flat.training.trained = true;
  auto p = params(2);
  p.candidate_set = {-1.0, 1.0, 0.0};
  CHECK(select_control(flat, {}, 90.0, {1.0, 1.0}, p).delta_u == 0.0);

  // p_next = p_out + 100 (tanh(e - 89) + tanh(91 - e)): even about e = 90, so
  // +-1 tie exactly and both beat 0 when the reference is 0.
  Mlp even({7, 2, 6}, nn::TargetMode::kIncrement);
  auto& h = even.layers()[0];
  h.w(0, 6) = 1.0;
  h.bias[0] = -89.0;
  h.w(1, 6) = -1.0;
  h.bias[1] = 91.0;
  even.layers()[1].w(0, 0) = 100.0;
  even.layers()[1].w(0, 1) = 100.0;
  even.output_min.assign(6, -1e4);
  even.output_max.assign(6, 1e4);
  even.training.trained = true;
  p.horizon_steps = 1;
  const auto a = select_control(even, {}, 90.0, {0.0, 0.0}, p);
  CHECK(a.candidates[0].cost == a.candidates[1].cost);
  CHECK(a.candidates[2].cost > a.candidates[0].cost);
  CHECK(a.delta_u == -1.0);
  p.candidate_set = {1.0, -1.0, 0.0};
  CHECK(select_control(even, {}, 90.0, {0.0, 0.0}, p).delta_u == 1.0);
}

TEST_CASE("only one finite candidate wins regardless of magnitude") {
  // Increments push p beyond 10x the training range except for +5.
  Mlp net({7, 6}, nn::TargetMode::kIncrement);
  auto& l = net.layers()[0];
  l.w(0, 6) = -1e3;
  l.bias[0] = 95.0 * 1e3;
  net.output_min.assign(6, -1.0);
  net.output_max.assign(6, 1.0);
  net.training.trained = true;
  const auto sel = select_control(net, {}, 90.0, {0.0, 0.0}, params(1));
  CHECK(sel.delta_u == 5.0);
  for (std::size_t i = 0; i + 1 < sel.candidates.size(); ++i) {
    CHECK(sel.candidates[i].diverged);
    CHECK(std::isinf(sel.candidates[i].cost));
  }
}

TEST_CASE("all divergent holds the command and counts a warning") {
  Mlp net({7, 6}, nn::TargetMode::kIncrement);
  net.layers()[0].bias[2] = 1e6;
  net.output_min.assign(6, -1.0);
  net.output_max.assign(6, 1.0);
  net.training.trained = true;
  NpcState st{92.0, 0, {}};
  const double e = npc_step(st, net, {}, {0.0, 0.0}, params(3));
  CHECK(e == 92.0);
  CHECK(st.all_divergent_warnings == 1);
  CHECK(st.last.all_divergent);
}

TEST_CASE("equilibrium keeps the command") {
  const auto net = linear_plant(100.0, 40.0, 91.0);
  NpcState st{91.0, 0, {}};
  const double e = npc_step(st, net, {1500.0, 200.0, 0, 0, 0, 0}, {1500.0, 200.0}, params(50));
  CHECK(e == 91.0);
}

TEST_CASE("commands stay inside the clamp") {
  const auto net = linear_plant(100.0, 0.0, 90.0);
  NpcState st{135.0, 0, {}};
  const double e = npc_step(st, net, {0.0, 0.0, 0, 0, 0, 0}, {4e4, 0.0}, params(5));
  CHECK(st.last.delta_u > 0.0);
  CHECK(e == 135.0);
}

TEST_CASE("the chosen candidate attains the minimum cost on random states") {
  auto net = Mlp::initialized(Mlp::default_dims(), nn::TargetMode::kIncrement, 77);
  net.input_norm.stddev = {1000, 1000, 1000, 1000, 1, 0.01, 10};
  net.input_norm.mean = {2000, 0, 0, 0, 0, 0, 90};
  net.output_norm.stddev = {10, 10, 10, 10, 0.01, 1e-4};
  net.output_min = {0, -2500, -5000, -5000, -1, -0.1};
  net.output_max = {5000, 2500, 5000, 5000, 1, 0.1};
  net.training.trained = true;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const PlantOutputVec y{rng.uniform(0, 5000), rng.uniform(-2500, 2500), 0, 0, rng.uniform(-0.5, 0.5),
                           rng.uniform(-0.05, 0.05)};
    const References refs{rng.uniform(0, 5000), rng.uniform(-2500, 2500)};
    const auto sel = select_control(net, y, rng.uniform(80, 100), refs, params(20));
    for (const auto& c : sel.candidates) CHECK(sel.candidates[sel.index].cost <= c.cost);
    CHECK(sel.delta_u == sel.candidates[sel.index].candidate);
  }
}
