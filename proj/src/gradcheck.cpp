#include <algorithm>
#include <cmath>

#include "vsglab/nn_model.hpp"
#include "vsglab/random.hpp"

namespace vsglab::nn {
namespace {

double batch_loss(const Mlp& net, std::span<const Sample> batch) { return dataset_loss(net, batch); }

}  // namespace

GradCheckReport gradient_check(std::uint64_t seed, const GradCheckOptions& options) {
  GradCheckReport report;
  Rng rng(seed);
  for (std::size_t k = 0; k < options.nets; ++k) {
    Mlp net = Mlp::initialized(Mlp::default_dims(), TargetMode::kAbsolute, rng.below(1u << 30));
    // Non-trivial biases and normalization so every term is exercised.
    for (auto& l : net.layers()) {
      for (auto& b : l.bias) b = rng.uniform(-0.5, 0.5);
    }
    for (std::size_t c = 0; c < net.input_size(); ++c) {
      net.input_norm.mean[c] = rng.uniform(-1.0, 1.0);
      net.input_norm.stddev[c] = rng.uniform(0.5, 2.0);
    }
    for (std::size_t c = 0; c < net.output_size(); ++c) {
      net.output_norm.mean[c] = rng.uniform(-1.0, 1.0);
      net.output_norm.stddev[c] = rng.uniform(0.5, 2.0);
    }
    std::vector<Sample> batch(options.samples);
    for (auto& s : batch) {
      for (auto& x : s.input) x = rng.uniform(-2.0, 2.0);
      for (auto& y : s.target) y = rng.uniform(-2.0, 2.0);
    }

    const Gradients g = mlp_backprop(net, batch);
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
      auto check = [&](std::vector<double>& param, const std::vector<double>& analytic) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          const double saved = param[i];
          param[i] = saved + options.step;
          const double up = batch_loss(net, batch);
          param[i] = saved - options.step;
          const double down = batch_loss(net, batch);
          param[i] = saved;
          const double numeric = (up - down) / (2.0 * options.step);
          const double diff = std::abs(analytic[i] - numeric);
          const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), options.abs_tol});
          report.max_rel_error = std::max(report.max_rel_error, diff / scale);
          ++report.parameters_checked;
          if (diff > options.rel_tol * scale + options.abs_tol) ++report.failures;
        }
      };
      check(net.layers()[li].weights, g.layers[li].weights);
      check(net.layers()[li].bias, g.layers[li].bias);
    }
  }
  return report;
}

}  // namespace vsglab::nn
