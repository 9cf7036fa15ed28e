#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsglab/errors.hpp"

// One-step plant predictor: a fully connected tanh network that maps the
// current plant output vector plus the commanded voltage onto the plant
// output vector one sample later.

namespace vsglab::nn {

inline constexpr std::size_t kOutputChannels = 6;
inline constexpr std::size_t kInputChannels = kOutputChannels + 1;

using OutputArray = std::array<double, kOutputChannels>;
using InputArray = std::array<double, kInputChannels>;

// Channel order is the serialization order everywhere (CSV, JSON, network).
struct PlantOutputVec {
  double p_out = 0.0;     // W, three-phase
  double q_out = 0.0;     // var, three-phase
  double p_err = 0.0;     // W, p_set - p_out
  double q_err = 0.0;     // var, q_set - q_out
  double freq_err = 0.0;  // rad/s, omega_i - omega_ref
  double delta = 0.0;     // rad

  OutputArray to_array() const { return {p_out, q_out, p_err, q_err, freq_err, delta}; }
  static PlantOutputVec from_array(std::span<const double> a);

  // Recomputes the two error channels against the given references.
  void refresh_errors(double p_set, double q_set) {
    p_err = p_set - p_out;
    q_err = q_set - q_out;
  }
};

const std::array<const char*, kOutputChannels>& output_channel_names();

InputArray make_input(const PlantOutputVec& y, double e_cmd);

struct NonFiniteOutput : Error {
  explicit NonFiniteOutput(const std::string& what)
      : Error(ErrorKind::kNumericFault, "non-finite-output: " + what) {}
};

struct TrainingDivergence : Error {
  explicit TrainingDivergence(const std::string& what)
      : Error(ErrorKind::kNumericFault, "divergence: " + what) {}
};

// ---------------------------------------------------------------------------
// Dataset

struct Sample {
  InputArray input{};
  OutputArray target{};
  std::int64_t episode = 0;
};

struct DatasetMetadata {
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::string scenario;
};

struct Dataset {
  std::vector<Sample> rows;
  DatasetMetadata metadata;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

// Splits off the trailing fraction of rows (temporal hold-out).
std::pair<Dataset, Dataset> split_holdout(const Dataset& data, double holdout_fraction);

void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Network

enum class TargetMode {
  kAbsolute,   // network output is the next plant output vector
  kIncrement,  // network output is the change from the current plant output
};

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  static ChannelStats identity(std::size_t channels);
  double normalize(std::size_t c, double x) const { return (x - mean[c]) / stddev[c]; }
  double denormalize(std::size_t c, double z) const { return z * stddev[c] + mean[c]; }
};

// Row-major weight matrix (outputs x inputs) and bias for one dense layer.
struct Layer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  Layer() = default;
  Layer(std::size_t in, std::size_t out)
      : inputs(in), outputs(out), weights(in * out, 0.0), bias(out, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weights[row * inputs + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * inputs + col]; }
};

struct TrainingMetadata {
  bool trained = false;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
  std::string dataset;
};

// Scratch buffers for allocation-free forward passes.
struct ForwardWorkspace {
  std::vector<double> a;
  std::vector<double> b;
};

class Mlp {
 public:
  static std::vector<std::size_t> default_dims() { return {7, 7, 7, 6}; }

  // Zero weights and biases, identity normalization.
  explicit Mlp(std::vector<std::size_t> dims = default_dims(),
               TargetMode mode = TargetMode::kAbsolute);

  // Uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
  static Mlp initialized(std::vector<std::size_t> dims, TargetMode mode,
                         std::uint64_t seed);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  TargetMode target_mode() const { return mode_; }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  ChannelStats input_norm;
  ChannelStats output_norm;
  // Training range of each absolute output channel, physical units.
  std::vector<double> output_min;
  std::vector<double> output_max;
  TrainingMetadata training;

  // Raw network in normalized coordinates: tanh hidden layers, linear output.
  void forward_normalized(std::span<const double> z_in, std::span<double> z_out,
                          ForwardWorkspace& ws) const;

  // Physical input -> physical next-step prediction. Throws NonFiniteOutput.
  void predict(std::span<const double> input, std::span<double> output,
               ForwardWorkspace& ws) const;
  std::vector<double> predict(std::span<const double> input) const;

  // Normalization target for a sample: the absolute next output or the
  // increment, depending on the target mode.
  double target_channel(const Sample& s, std::size_t c) const;

  void validate() const;

 private:
  std::vector<std::size_t> dims_;
  TargetMode mode_;
  std::vector<Layer> layers_;
};

// Sets input/output z-score statistics and output ranges from the rows.
// Channels with zero spread get unit scale.
void fit_normalization(Mlp& net, std::span<const Sample> rows);

// Forward pass; alias for Mlp::predict.
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input);

// ---------------------------------------------------------------------------
// Training

struct Gradients {
  std::vector<Layer> layers;  // same shapes as the network
  double loss = 0.0;
};

// Mean squared error over all samples and output channels in normalized
// space, and its exact gradient with respect to every weight and bias.
Gradients mlp_backprop(const Mlp& net, std::span<const Sample> batch);

struct TrainOptions {
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;  // 0 = full batch
  double momentum = 0.0;       // heavy-ball momentum, 0 disables
  bool verbose = false;
};

struct TrainResult {
  Mlp net;
  std::vector<double> loss_history;  // mean batch loss per epoch
};

TrainResult train_batch(const Mlp& net, const Dataset& data, const TrainOptions& options);

// Mean normalized-space loss of the network on the rows.
double dataset_loss(const Mlp& net, std::span<const Sample> rows);

struct FitResult {
  Mlp net;
  std::vector<double> loss_history;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
};

// Full pipeline from a dataset: trailing hold-out split, fresh initialization
// from options.seed, normalization fitted on the training part, training,
// and metadata (trained flag, final losses, dataset name) filled in.
FitResult fit_model(const Dataset& data, const TrainOptions& options,
                    TargetMode mode = TargetMode::kIncrement, double holdout_fraction = 0.1,
                    const std::string& dataset_name = "");

struct EvaluationReport {
  std::array<double, kOutputChannels> rmse{};
  std::array<double, kOutputChannels> range{};
  std::array<double, kOutputChannels> rmse_pct_of_range{};
  std::size_t rows = 0;
};

// One-step RMSE per channel in physical units. Range is the training range
// stored in the model.
EvaluationReport evaluate(const Mlp& net, std::span<const Sample> rows);

// ---------------------------------------------------------------------------
// Gradient check

struct GradCheckOptions {
  std::size_t nets = 20;
  std::size_t samples = 5;
  double step = 1e-6;
  double rel_tol = 1e-4;
  double abs_tol = 1e-8;
};

struct GradCheckReport {
  std::size_t parameters_checked = 0;
  std::size_t failures = 0;
  double max_rel_error = 0.0;  // |analytic - numeric| / max(|analytic|, |numeric|, abs_tol)
  bool passed() const { return failures == 0; }
};

// Compares mlp_backprop with central differences of the same loss on random
// networks and random batches.
GradCheckReport gradient_check(std::uint64_t seed, const GradCheckOptions& options = {});

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kModelFormatVersion = 1;

std::string to_json(const Mlp& net);
Mlp from_json(const std::string& text);
void save_model(const Mlp& net, const std::string& path);
Mlp load_model(const std::string& path);

}  // namespace vsglab::nn
