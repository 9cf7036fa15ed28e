#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vsglab/nn_model.hpp"
#include "vsglab/random.hpp"

namespace vsglab::nn {

PlantOutputVec PlantOutputVec::from_array(std::span<const double> a) {
  if (a.size() < kOutputChannels) throw InvalidParams("plant output vector needs 6 channels");
  return {a[0], a[1], a[2], a[3], a[4], a[5]};
}

const std::array<const char*, kOutputChannels>& output_channel_names() {
  static const std::array<const char*, kOutputChannels> names = {
      "p_out", "q_out", "p_err", "q_err", "freq_err", "delta"};
  return names;
}

InputArray make_input(const PlantOutputVec& y, double e_cmd) {
  return {y.p_out, y.q_out, y.p_err, y.q_err, y.freq_err, y.delta, e_cmd};
}

ChannelStats ChannelStats::identity(std::size_t channels) {
  return {std::vector<double>(channels, 0.0), std::vector<double>(channels, 1.0)};
}

Mlp::Mlp(std::vector<std::size_t> dims, TargetMode mode)
    : dims_(std::move(dims)), mode_(mode) {
  if (dims_.size() < 2) throw InvalidParams("network needs at least two layer dims");
  for (auto d : dims_) {
    if (d == 0) throw InvalidParams("layer dims must be positive");
  }
  if (mode_ == TargetMode::kIncrement && output_size() > input_size()) {
    throw InvalidParams("increment mode needs outputs <= inputs");
  }
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) layers_.emplace_back(dims_[i], dims_[i + 1]);
  input_norm = ChannelStats::identity(input_size());
  output_norm = ChannelStats::identity(output_size());
  output_min.assign(output_size(), -1.0);
  output_max.assign(output_size(), 1.0);
}

Mlp Mlp::initialized(std::vector<std::size_t> dims, TargetMode mode, std::uint64_t seed) {
  Mlp net(std::move(dims), mode);
  Rng rng(seed);
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs));
    for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

void Mlp::validate() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  for (const auto& l : layers_) {
    if (!finite(l.weights) || !finite(l.bias)) throw NonFiniteOutput("non-finite network parameter");
  }
  for (const auto* stats : {&input_norm, &output_norm}) {
    for (double s : stats->stddev) {
      if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParams("normalization stddev must be positive");
    }
  }
}

void Mlp::forward_normalized(std::span<const double> z_in, std::span<double> z_out,
                             ForwardWorkspace& ws) const {
  std::size_t widest = 0;
  for (auto d : dims_) widest = std::max(widest, d);
  ws.a.resize(widest);
  ws.b.resize(widest);
  std::copy(z_in.begin(), z_in.begin() + static_cast<std::ptrdiff_t>(input_size()), ws.a.begin());

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Layer& layer = layers_[li];
    const bool hidden = li + 1 < layers_.size();
    const double* x = ws.a.data();
    double* y = ws.b.data();
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      const double* row = layer.weights.data() + r * layer.inputs;
      double acc = layer.bias[r];
      for (std::size_t c = 0; c < layer.inputs; ++c) acc += row[c] * x[c];
      y[r] = hidden ? std::tanh(acc) : acc;
    }
    std::swap(ws.a, ws.b);
  }
  std::copy(ws.a.begin(), ws.a.begin() + static_cast<std::ptrdiff_t>(output_size()), z_out.begin());
}

void Mlp::predict(std::span<const double> input, std::span<double> output,
                  ForwardWorkspace& ws) const {
  const std::size_t n_in = input_size();
  const std::size_t n_out = output_size();
  double z_in[64];
  double z_out[64];
  if (n_in > 64 || n_out > 64) throw InvalidParams("layer too wide for predict");
  for (std::size_t c = 0; c < n_in; ++c) z_in[c] = input_norm.normalize(c, input[c]);
  forward_normalized({z_in, n_in}, {z_out, n_out}, ws);
  for (std::size_t c = 0; c < n_out; ++c) {
    double v = output_norm.denormalize(c, z_out[c]);
    if (mode_ == TargetMode::kIncrement) v += input[c];
    if (!std::isfinite(v)) throw NonFiniteOutput("prediction overflowed");
    output[c] = v;
  }
}

std::vector<double> Mlp::predict(std::span<const double> input) const {
  if (input.size() != input_size()) throw InvalidParams("input width does not match network");
  ForwardWorkspace ws;
  std::vector<double> out(output_size());
  predict(input, out, ws);
  return out;
}

double Mlp::target_channel(const Sample& s, std::size_t c) const {
  return mode_ == TargetMode::kIncrement ? s.target[c] - s.input[c] : s.target[c];
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input) {
  return net.predict(input);
}

void fit_normalization(Mlp& net, std::span<const Sample> rows) {
  if (rows.empty()) throw InvalidParams("cannot fit normalization on an empty dataset");
  const std::size_t n_in = net.input_size();
  const std::size_t n_out = net.output_size();
  if (n_in != kInputChannels || n_out != kOutputChannels) {
    throw InvalidParams("normalization fitting expects a 7-input, 6-output network");
  }
  const double n = static_cast<double>(rows.size());

  auto stats_of = [&](std::size_t channels, auto value) {
    ChannelStats s{std::vector<double>(channels, 0.0), std::vector<double>(channels, 0.0)};
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < channels; ++c) s.mean[c] += value(row, c);
    }
    for (auto& m : s.mean) m /= n;
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double d = value(row, c) - s.mean[c];
        s.stddev[c] += d * d;
      }
    }
    for (auto& v : s.stddev) {
      v = std::sqrt(v / n);
      if (!(v > 0.0)) v = 1.0;
    }
    return s;
  };

  net.input_norm = stats_of(n_in, [](const Sample& s, std::size_t c) { return s.input[c]; });
  net.output_norm = stats_of(n_out, [&](const Sample& s, std::size_t c) { return net.target_channel(s, c); });

  net.output_min.assign(n_out, rows.front().target[0]);
  net.output_max.assign(n_out, rows.front().target[0]);
  for (std::size_t c = 0; c < n_out; ++c) {
    net.output_min[c] = net.output_max[c] = rows.front().target[c];
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < n_out; ++c) {
      net.output_min[c] = std::min(net.output_min[c], row.target[c]);
      net.output_max[c] = std::max(net.output_max[c], row.target[c]);
    }
  }
}

}  // namespace vsglab::nn
