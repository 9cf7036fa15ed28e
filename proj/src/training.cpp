#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "vsglab/nn_model.hpp"
#include "vsglab/random.hpp"

namespace vsglab::nn {
namespace {

// Rows pre-normalized into contiguous arrays.
struct NormalizedRows {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::size_t size() const { return n_in == 0 ? 0 : inputs.size() / n_in; }
  const double* input(std::size_t i) const { return inputs.data() + i * n_in; }
  const double* target(std::size_t i) const { return targets.data() + i * n_out; }
};

NormalizedRows normalize_rows(const Mlp& net, std::span<const Sample> rows) {
  NormalizedRows out;
  out.n_in = net.input_size();
  out.n_out = net.output_size();
  if (out.n_in != kInputChannels || out.n_out != kOutputChannels) {
    throw InvalidParams("training expects a 7-input, 6-output network");
  }
  out.inputs.reserve(rows.size() * out.n_in);
  out.targets.reserve(rows.size() * out.n_out);
  for (const auto& s : rows) {
    for (std::size_t c = 0; c < out.n_in; ++c) out.inputs.push_back(net.input_norm.normalize(c, s.input[c]));
    for (std::size_t c = 0; c < out.n_out; ++c) {
      out.targets.push_back(net.output_norm.normalize(c, net.target_channel(s, c)));
    }
  }
  return out;
}

std::vector<Layer> zero_like(const Mlp& net) {
  std::vector<Layer> g;
  for (const auto& l : net.layers()) g.emplace_back(l.inputs, l.outputs);
  return g;
}

// Backprop scratch: activations per layer (index 0 is the input) and deltas.
class Backprop {
 public:
  explicit Backprop(const Mlp& net) : net_(net) {
    const auto& dims = net.dims();
    acts_.resize(dims.size());
    deltas_.resize(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      acts_[i].resize(dims[i]);
      deltas_[i].resize(dims[i]);
    }
  }

  // Adds d(loss)/d(params) scaled by `scale` into grads; returns the sample's
  // sum of squared errors.
  double accumulate(const double* z_in, const double* z_target, double scale,
                    std::vector<Layer>& grads) {
    const auto& layers = net_.layers();
    const std::size_t depth = layers.size();
    std::copy(z_in, z_in + acts_[0].size(), acts_[0].begin());

    for (std::size_t li = 0; li < depth; ++li) {
      const Layer& layer = layers[li];
      const bool hidden = li + 1 < depth;
      const auto& x = acts_[li];
      auto& y = acts_[li + 1];
      for (std::size_t r = 0; r < layer.outputs; ++r) {
        const double* row = layer.weights.data() + r * layer.inputs;
        double acc = layer.bias[r];
        for (std::size_t c = 0; c < layer.inputs; ++c) acc += row[c] * x[c];
        y[r] = hidden ? std::tanh(acc) : acc;
      }
    }

    double sse = 0.0;
    auto& out_delta = deltas_[depth];
    for (std::size_t c = 0; c < out_delta.size(); ++c) {
      const double err = acts_[depth][c] - z_target[c];
      sse += err * err;
      out_delta[c] = 2.0 * err * scale;
    }

    for (std::size_t li = depth; li-- > 0;) {
      const Layer& layer = layers[li];
      Layer& g = grads[li];
      const auto& x = acts_[li];
      const auto& d = deltas_[li + 1];
      for (std::size_t r = 0; r < layer.outputs; ++r) {
        g.bias[r] += d[r];
        double* grow = g.weights.data() + r * layer.inputs;
        for (std::size_t c = 0; c < layer.inputs; ++c) grow[c] += d[r] * x[c];
      }
      if (li == 0) break;
      // Propagate through W^T and the tanh of the layer below.
      auto& below = deltas_[li];
      for (std::size_t c = 0; c < layer.inputs; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < layer.outputs; ++r) acc += layer.w(r, c) * d[r];
        below[c] = acc * (1.0 - x[c] * x[c]);
      }
    }
    return sse;
  }

 private:
  const Mlp& net_;
  std::vector<std::vector<double>> acts_;
  std::vector<std::vector<double>> deltas_;
};

// Mean loss and gradient over the given row indices.
double batch_gradient(const Mlp& net, const NormalizedRows& rows,
                      std::span<const std::size_t> idx, std::vector<Layer>& grads) {
  for (auto& g : grads) {
    std::fill(g.weights.begin(), g.weights.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
  }
  Backprop bp(net);
  const double denom = static_cast<double>(idx.size() * rows.n_out);
  double sse = 0.0;
  for (auto i : idx) sse += bp.accumulate(rows.input(i), rows.target(i), 1.0 / denom, grads);
  return sse / denom;
}

}  // namespace

Gradients mlp_backprop(const Mlp& net, std::span<const Sample> batch) {
  if (batch.empty()) throw InvalidParams("backprop batch must be non-empty");
  const NormalizedRows rows = normalize_rows(net, batch);
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  Gradients out;
  out.layers = zero_like(net);
  out.loss = batch_gradient(net, rows, idx, out.layers);
  return out;
}

double dataset_loss(const Mlp& net, std::span<const Sample> rows) {
  if (rows.empty()) return 0.0;
  ForwardWorkspace ws;
  const std::size_t n_out = net.output_size();
  std::vector<double> z_in(net.input_size());
  std::vector<double> z_out(n_out);
  double sse = 0.0;
  for (const auto& s : rows) {
    for (std::size_t c = 0; c < z_in.size(); ++c) z_in[c] = net.input_norm.normalize(c, s.input[c]);
    net.forward_normalized(z_in, z_out, ws);
    for (std::size_t c = 0; c < n_out; ++c) {
      const double err = z_out[c] - net.output_norm.normalize(c, net.target_channel(s, c));
      sse += err * err;
    }
  }
  return sse / static_cast<double>(rows.size() * n_out);
}

TrainResult train_batch(const Mlp& net, const Dataset& data, const TrainOptions& options) {
  if (!(options.learning_rate > 0.0)) throw InvalidParams("learning rate must be positive");
  if (options.momentum < 0.0 || options.momentum >= 1.0) {
    throw InvalidParams("momentum must lie in [0, 1)");
  }
  TrainResult result{net, {}};
  if (options.epochs == 0) return result;
  if (data.empty()) throw InvalidParams("training data is empty");

  Mlp& model = result.net;
  const NormalizedRows rows = normalize_rows(model, data.rows);
  const std::size_t n = rows.size();
  const std::size_t batch = options.batch_size == 0 ? n : std::min(options.batch_size, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);

  std::vector<Layer> grads = zero_like(model);
  std::vector<Layer> velocity = zero_like(model);
  double initial_loss = -1.0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    if (batch < n) {
      for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      const double loss = batch_gradient(model, rows, {order.data() + start, len}, grads);
      if (initial_loss < 0.0) initial_loss = loss;
      if (!std::isfinite(loss) || loss > 1e6 * std::max(initial_loss, 1e-300)) {
        throw TrainingDivergence("loss grew beyond 1e6 x its initial value");
      }
      loss_sum += loss;
      ++batches;

      auto& layers = model.layers();
      for (std::size_t li = 0; li < layers.size(); ++li) {
        auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                          std::vector<double>& v) {
          for (std::size_t k = 0; k < param.size(); ++k) {
            v[k] = options.momentum * v[k] - options.learning_rate * g[k];
            param[k] += v[k];
          }
        };
        update(layers[li].weights, grads[li].weights, velocity[li].weights);
        update(layers[li].bias, grads[li].bias, velocity[li].bias);
      }
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(batches));
    if (options.verbose) {
      std::cerr << "epoch " << epoch + 1 << "/" << options.epochs
                << " loss " << result.loss_history.back() << "\n";
    }
  }
  model.training.epochs += options.epochs;
  model.training.seed = options.seed;
  model.training.learning_rate = options.learning_rate;
  model.training.final_train_loss = result.loss_history.back();
  return result;
}

FitResult fit_model(const Dataset& data, const TrainOptions& options, TargetMode mode,
                    double holdout_fraction, const std::string& dataset_name) {
  auto [train, valid] = split_holdout(data, holdout_fraction);
  if (train.empty()) throw InvalidParams("training split is empty");
  Mlp net = Mlp::initialized(Mlp::default_dims(), mode, options.seed);
  fit_normalization(net, train.rows);
  TrainResult trained = train_batch(net, train, options);
  FitResult out{std::move(trained.net), std::move(trained.loss_history), train.size(), valid.size()};
  out.net.training.trained = true;
  out.net.training.dataset = dataset_name;
  out.net.training.final_train_loss = dataset_loss(out.net, train.rows);
  out.net.training.final_validation_loss = dataset_loss(out.net, valid.rows);
  return out;
}

EvaluationReport evaluate(const Mlp& net, std::span<const Sample> rows) {
  EvaluationReport report;
  report.rows = rows.size();
  ForwardWorkspace ws;
  std::array<double, kOutputChannels> sse{};
  OutputArray pred{};
  for (const auto& s : rows) {
    net.predict(s.input, pred, ws);
    for (std::size_t c = 0; c < kOutputChannels; ++c) {
      const double e = pred[c] - s.target[c];
      sse[c] += e * e;
    }
  }
  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    report.rmse[c] = rows.empty() ? 0.0 : std::sqrt(sse[c] / static_cast<double>(rows.size()));
    report.range[c] = net.output_max[c] - net.output_min[c];
    report.rmse_pct_of_range[c] = report.range[c] > 0.0 ? 100.0 * report.rmse[c] / report.range[c] : 0.0;
  }
  return report;
}

}  // namespace vsglab::nn
