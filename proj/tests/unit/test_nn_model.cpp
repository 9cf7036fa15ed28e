#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "vsglab/nn_model.hpp"
#include "vsglab/random.hpp"

using namespace vsglab;
using namespace vsglab::nn;

namespace {

Dataset random_dataset(std::size_t n, std::uint64_t seed, double (*target)(const InputArray&, std::size_t)) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    for (auto& x : s.input) x = rng.uniform(-3.0, 3.0);
    for (std::size_t c = 0; c < kOutputChannels; ++c) s.target[c] = target(s.input, c);
    d.rows.push_back(s);
  }
  return d;
}

double linear_target(const InputArray& x, std::size_t c) {
  double acc = 0.1 * static_cast<double>(c);
  for (std::size_t i = 0; i < x.size(); ++i) acc += 0.05 * static_cast<double>((i + 2 * c) % 5) * x[i];
  return acc;
}

double smooth_target(const InputArray& x, std::size_t c) {
  return std::sin(x[c] * 0.5) + 0.2 * x[6];
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vsglab_test_" + name);
}

}  // namespace

TEST_CASE("zero network predicts zeros") {
  Mlp net;
  const std::vector<double> in{1, 2, 3, 4, 5, 6, 7};
  for (double v : net.predict(in)) CHECK(v == 0.0);
  CHECK(net.parameter_count() == 7 * 7 + 7 + 7 * 7 + 7 + 7 * 6 + 6);
}

TEST_CASE("output layer bias passes through when hidden contribution is zero") {
  Mlp net;
  for (std::size_t r = 0; r < 6; ++r) net.layers().back().bias[r] = 0.5 * static_cast<double>(r) - 1.0;
  const std::vector<double> in{0.3, -2, 5, 1, 0, 9, 90};
  const auto out = mlp_forward(net, in);
  for (std::size_t r = 0; r < 6; ++r) CHECK(out[r] == 0.5 * static_cast<double>(r) - 1.0);
}

TEST_CASE("increment mode adds the current output channels") {
  Mlp net(Mlp::default_dims(), TargetMode::kIncrement);
  net.layers().back().bias[1] = 2.0;
  const std::vector<double> in{10, 20, 30, 40, 50, 60, 70};
  const auto out = net.predict(in);
  CHECK(out[0] == 10.0);
  CHECK(out[1] == 22.0);
  CHECK(out[5] == 60.0);
}

TEST_CASE("initialization bounds") {
  const auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 3);
  for (const auto& l : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.inputs));
    for (double w : l.weights) CHECK(std::abs(w) <= bound);
    for (double b : l.bias) CHECK(b == 0.0);
  }
  const auto again = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 3);
  CHECK(again.layers()[1].weights == net.layers()[1].weights);
}

TEST_CASE("backprop: exact targets give zero loss and zero gradient") {
  auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 11);
  auto data = random_dataset(5, 1, linear_target);
  for (auto& s : data.rows) {
    const auto y = net.predict(s.input);
    std::copy(y.begin(), y.end(), s.target.begin());
  }
  const auto g = mlp_backprop(net, data.rows);
  CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-24));
  for (const auto& l : g.layers) {
    for (double w : l.weights) CHECK(std::abs(w) < 1e-14);
    for (double b : l.bias) CHECK(std::abs(b) < 1e-14);
  }
}

TEST_CASE("backprop: single linear layer matches the least-squares gradient") {
  Mlp net({7, 6}, TargetMode::kAbsolute);
  Rng rng(5);
  for (auto& w : net.layers()[0].weights) w = rng.uniform(-1, 1);
  for (auto& b : net.layers()[0].bias) b = rng.uniform(-1, 1);
  const auto data = random_dataset(3, 2, linear_target);
  const auto g = mlp_backprop(net, data.rows);

  const double scale = 2.0 / (3.0 * 6.0);
  const Layer& l = net.layers()[0];
  Layer expect(7, 6);
  double loss = 0.0;
  for (const auto& s : data.rows) {
    for (std::size_t r = 0; r < 6; ++r) {
      double y = l.bias[r];
      for (std::size_t c = 0; c < 7; ++c) y += l.w(r, c) * s.input[c];
      const double err = y - s.target[r];
      loss += err * err / 18.0;
      expect.bias[r] += scale * err;
      for (std::size_t c = 0; c < 7; ++c) expect.w(r, c) += scale * err * s.input[c];
    }
  }
  CHECK(g.loss == doctest::Approx(loss).epsilon(1e-13));
  for (std::size_t i = 0; i < expect.weights.size(); ++i) {
    CHECK(g.layers[0].weights[i] == doctest::Approx(expect.weights[i]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < 6; ++i) CHECK(g.layers[0].bias[i] == doctest::Approx(expect.bias[i]).epsilon(1e-12));
}

TEST_CASE("backprop agrees with central finite differences") {
  const auto report = gradient_check(42);
  CHECK(report.parameters_checked == 20 * 160);
  CHECK(report.failures == 0);
  CHECK(report.passed());
}

TEST_CASE("normalization statistics and round trip") {
  Dataset d;
  for (int i = 0; i < 4; ++i) {
    Sample s;
    s.input = {double(i), 2.0 * i, 5.0, 0, 0, 0, 1.0 * i};
    s.target = {double(i + 1), 0, 0, 0, 0, 0};
    d.rows.push_back(s);
  }
  Mlp net;
  fit_normalization(net, d.rows);
  CHECK(net.input_norm.mean[0] == doctest::Approx(1.5));
  CHECK(net.input_norm.stddev[0] == doctest::Approx(std::sqrt(1.25)));
  CHECK(net.input_norm.stddev[2] == 1.0);  // constant channel
  CHECK(net.output_min[0] == 1.0);
  CHECK(net.output_max[0] == 4.0);
  for (double x : {-3.0, 0.0, 2.5, 1e4}) {
    CHECK(net.input_norm.denormalize(1, net.input_norm.normalize(1, x)) == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("zero epochs return the net unchanged") {
  const auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 1);
  const auto data = random_dataset(10, 3, linear_target);
  TrainOptions opt;
  opt.epochs = 0;
  const auto r = train_batch(net, data, opt);
  CHECK(r.loss_history.empty());
  CHECK(to_json(r.net) == to_json(net));
}

TEST_CASE("a linear target is learned by a linear network") {
  Mlp net({7, 6}, TargetMode::kAbsolute);
  const auto data = random_dataset(200, 4, linear_target);
  TrainOptions opt;
  opt.epochs = 2000;
  opt.learning_rate = 0.2;
  const auto r = train_batch(net, data, opt);
  CHECK(r.loss_history.front() > 1e-2);
  CHECK(r.loss_history.back() < 1e-12);
}

TEST_CASE("full-batch loss is monotone for a small learning rate") {
  auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 9);
  const auto data = random_dataset(64, 5, smooth_target);
  fit_normalization(net, data.rows);
  TrainOptions opt;
  opt.epochs = 200;
  opt.learning_rate = 0.01;
  const auto r = train_batch(net, data, opt);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
  CHECK(r.loss_history.back() < r.loss_history.front());
}

TEST_CASE("mini-batch training is deterministic in the seed") {
  const auto data = random_dataset(300, 6, smooth_target);
  TrainOptions opt;
  opt.epochs = 5;
  opt.batch_size = 32;
  opt.momentum = 0.9;
  opt.seed = 17;
  const auto a = fit_model(data, opt);
  const auto b = fit_model(data, opt);
  CHECK(to_json(a.net) == to_json(b.net));
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.net.training.trained);
  CHECK(a.train_rows == 270);
  CHECK(a.validation_rows == 30);
  opt.seed = 18;
  const auto c = fit_model(data, opt);
  CHECK(to_json(c.net) != to_json(a.net));
}

TEST_CASE("diverging training is reported") {
  auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, 2);
  const auto data = random_dataset(50, 7, linear_target);
  TrainOptions opt;
  opt.epochs = 200;
  opt.learning_rate = 1e3;
  CHECK_THROWS_AS(train_batch(net, data, opt), TrainingDivergence);
}

TEST_CASE("evaluation of an exact predictor") {
  Mlp net({7, 6}, TargetMode::kAbsolute);
  for (std::size_t r = 0; r < 6; ++r) net.layers()[0].w(r, r) = 1.0;
  auto data = random_dataset(20, 8, linear_target);
  for (auto& s : data.rows) std::copy(s.input.begin(), s.input.begin() + 6, s.target.begin());
  fit_normalization(net, data.rows);
  net.input_norm = ChannelStats::identity(7);
  net.output_norm = ChannelStats::identity(6);
  const auto rep = evaluate(net, data.rows);
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(rep.rmse[c] == doctest::Approx(0.0));
    CHECK(rep.range[c] > 0.0);
  }
}

TEST_CASE("model JSON round trip") {
  auto net = Mlp::initialized(Mlp::default_dims(), TargetMode::kIncrement, 21);
  const auto data = random_dataset(40, 9, smooth_target);
  fit_normalization(net, data.rows);
  net.training.trained = true;
  net.training.seed = 21;
  const auto path = temp_path("model.json").string();
  save_model(net, path);
  const auto back = load_model(path);
  CHECK(to_json(back) == to_json(net));
  CHECK(back.target_mode() == TargetMode::kIncrement);
  const auto a = net.predict(data.rows[3].input);
  const auto b = back.predict(data.rows[3].input);
  CHECK(a == b);
  CHECK_THROWS_AS(from_json("{\"format\": \"other\"}"), IoError);
  CHECK_THROWS_AS(from_json("not json"), IoError);
}

TEST_CASE("dataset CSV round trip and hold-out split") {
  auto data = random_dataset(25, 10, smooth_target);
  data.metadata = {1e-3, 99, "unit"};
  for (std::size_t i = 0; i < data.size(); ++i) data.rows[i].episode = static_cast<std::int64_t>(i / 10);
  const auto path = temp_path("data.csv").string();
  write_dataset_csv(data, path);
  const auto back = read_dataset_csv(path);
  REQUIRE(back.size() == 25);
  CHECK(back.metadata.seed == 99);
  CHECK(back.metadata.scenario == "unit");
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(back.rows[i].input == data.rows[i].input);
    CHECK(back.rows[i].target == data.rows[i].target);
    CHECK(back.rows[i].episode == data.rows[i].episode);
  }
  const auto [train, valid] = split_holdout(data, 0.2);
  CHECK(train.size() == 20);
  CHECK(valid.size() == 5);
  CHECK(valid.rows.front().input == data.rows[20].input);
  CHECK_THROWS_AS(read_dataset_csv(temp_path("missing.csv").string()), IoError);
}
