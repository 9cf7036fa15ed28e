// Command-line front end for the simulation laboratory.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vsglab/errors.hpp"
#include "vsglab/harness/compare.hpp"
#include "vsglab/harness/tune.hpp"
#include "vsglab/nn_model.hpp"
#include "vsglab/text_io.hpp"

namespace {

using namespace vsglab;
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 1;
    case ErrorKind::kNumericFault: return 2;
    case ErrorKind::kIo: return 3;
  }
  return 1;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const auto config = harness::load_scenario(config_path);
  const auto record = harness::run_scenario(config);
  const auto summary = harness::summarize(record, config);
  harness::write_report({record}, {summary}, out_dir);
  std::cout << harness::report_text({summary});
  if (record.fault) {
    std::cerr << *record.fault << "\n";
    return 2;
  }
  return 0;
}

int cmd_collect(const std::string& config_path, double duration, std::uint64_t seed, const std::string& out) {
  const auto config = harness::load_scenario(config_path);
  const auto data = harness::collect_dataset(config, duration, seed);
  nn::write_dataset_csv(data, out);
  std::cout << "wrote " << data.size() << " pairs to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const nn::TrainOptions& options, const std::string& mode,
              const std::string& out) {
  const auto data = nn::read_dataset_csv(data_path);
  const auto target = mode == "absolute" ? nn::TargetMode::kAbsolute : nn::TargetMode::kIncrement;
  const auto fit = nn::fit_model(data, options, target, 0.1, fs::path(data_path).filename().string());
  nn::save_model(fit.net, out);
  std::cout << "trained on " << fit.train_rows << " rows, held out " << fit.validation_rows << "\n"
            << "final train loss " << fit.net.training.final_train_loss << ", validation loss "
            << fit.net.training.final_validation_loss << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path) {
  const auto net = nn::load_model(model_path);
  const auto data = nn::read_dataset_csv(data_path);
  const auto rep = nn::evaluate(net, data.rows);
  std::cout << std::left << std::setw(10) << "channel" << std::right << std::setw(14) << "rmse" << std::setw(14)
            << "range" << std::setw(12) << "rmse %" << "\n";
  for (std::size_t c = 0; c < nn::kOutputChannels; ++c) {
    std::cout << std::left << std::setw(10) << nn::output_channel_names()[c] << std::right << std::setw(14)
              << rep.rmse[c] << std::setw(14) << rep.range[c] << std::setw(12) << std::fixed << std::setprecision(3)
              << rep.rmse_pct_of_range[c] << std::defaultfloat << "\n";
  }
  std::cout << rep.rows << " rows\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir) {
  std::vector<harness::ScenarioConfig> configs;
  for (const auto& p : config_paths) configs.push_back(harness::load_scenario(p));
  const auto report = harness::compare(configs);
  harness::write_report(report.records, report.scenarios, out_dir);
  std::cout << harness::report_text(report.scenarios);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
  const auto rep = nn::gradient_check(seed);
  std::cout << "checked " << rep.parameters_checked << " parameters, max relative error " << rep.max_rel_error
            << ", failures " << rep.failures << "\n";
  return rep.passed() ? 0 : 2;
}

int cmd_tune(const std::string& config_path) {
  const auto config = harness::load_scenario(config_path);
  const auto result = harness::tune_pi_grid(config);
  std::size_t passing = 0;
  for (const auto& c : result.candidates) passing += c.gate ? 1 : 0;
  const auto& b = result.best;
  std::cout << passing << " of " << result.candidates.size() << " gain sets pass the gate\n"
            << "best: k_p=" << b.params.k_p << " k_i=" << b.params.k_i << " mix_p=" << b.params.mix_p
            << " objective=" << b.objective << (b.gate ? "" : " (gate not met)") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VSG controller simulation laboratory"};
  app.require_subcommand(1);

  std::string config, out, data, model, mode = "increment";
  std::vector<std::string> configs;
  double duration = 200.0;
  std::uint64_t seed = 0;
  nn::TrainOptions train;
  train.batch_size = 256;
  train.momentum = 0.9;

  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("--config", config, "scenario JSON")->required();
  simulate->add_option("--out", out, "output directory")->required();

  auto* collect = app.add_subcommand("collect", "log a training dataset under random references");
  collect->add_option("--config", config, "scenario JSON (pi_droop or tuned_pi)")->required();
  collect->add_option("--duration", duration, "simulated seconds")->capture_default_str();
  collect->add_option("--seed", seed, "excitation seed")->capture_default_str();
  collect->add_option("--out", out, "dataset CSV")->required();

  auto* trainer = app.add_subcommand("train", "fit the plant predictor");
  trainer->add_option("--data", data, "dataset CSV")->required();
  trainer->add_option("--epochs", train.epochs)->capture_default_str();
  trainer->add_option("--lr", train.learning_rate)->capture_default_str();
  trainer->add_option("--seed", train.seed)->capture_default_str();
  trainer->add_option("--batch", train.batch_size, "mini-batch size, 0 = full batch")->capture_default_str();
  trainer->add_option("--momentum", train.momentum)->capture_default_str();
  trainer->add_option("--target", mode, "increment | absolute")
      ->check(CLI::IsMember({"increment", "absolute"}))
      ->capture_default_str();
  trainer->add_flag("--verbose", train.verbose);
  trainer->add_option("--out", out, "model JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "one-step RMSE of a model on a dataset");
  evaluate->add_option("--model", model)->required();
  evaluate->add_option("--data", data)->required();

  auto* comparer = app.add_subcommand("compare", "run scenarios side by side");
  comparer->add_option("--configs", configs, "scenario JSON files")->required()->delimiter(',');
  comparer->add_option("--out", out, "output directory")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of backprop");
  gradcheck->add_option("--seed", seed)->capture_default_str();

  auto* tune = app.add_subcommand("tune", "grid search for tuned_pi gains");
  tune->add_option("--config", config, "scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(config, out);
    if (*collect) return cmd_collect(config, duration, seed, out);
    if (*trainer) return cmd_train(data, train, mode, out);
    if (*evaluate) return cmd_evaluate(model, data);
    if (*comparer) return cmd_compare(configs, out);
    if (*gradcheck) return cmd_gradcheck(seed);
    if (*tune) return cmd_tune(config);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
