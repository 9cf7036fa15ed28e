#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vsglab/nn_model.hpp"
#include "vsglab/text_io.hpp"

namespace vsglab::nn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset CSV

namespace {

const char* kCsvHeader =
    "episode,p_out,q_out,p_err,q_err,freq_err,delta,e_cmd,"
    "next_p_out,next_q_out,next_p_err,next_q_err,next_freq_err,next_delta";
constexpr std::size_t kCsvColumns = 1 + kInputChannels + kOutputChannels;

void parse_metadata(std::string_view line, DatasetMetadata& meta) {
  line.remove_prefix(1);  // '#'
  for (auto token : text::split(line, ' ')) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "dt") {
      meta.dt = text::parse_double(value);
    } else if (key == "seed") {
      meta.seed = static_cast<std::uint64_t>(std::stoull(std::string(value)));
    } else if (key == "scenario") {
      meta.scenario = std::string(value);
    }
  }
}

}  // namespace

std::pair<Dataset, Dataset> split_holdout(const Dataset& data, double holdout_fraction) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw InvalidParams("hold-out fraction must lie in [0, 1)");
  }
  const auto held = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(data.size())));
  const auto cut = static_cast<std::ptrdiff_t>(data.size() - held);
  Dataset train{{data.rows.begin(), data.rows.begin() + cut}, data.metadata};
  Dataset valid{{data.rows.begin() + cut, data.rows.end()}, data.metadata};
  return {std::move(train), std::move(valid)};
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  out << "# dt=" << text::format_double(data.metadata.dt) << " seed=" << data.metadata.seed;
  if (!data.metadata.scenario.empty()) out << " scenario=" << data.metadata.scenario;
  out << "\n" << kCsvHeader << "\n";
  for (const auto& s : data.rows) {
    out << s.episode;
    for (double v : s.input) out << ',' << text::format_double(v);
    for (double v : s.target) out << ',' << text::format_double(v);
    out << '\n';
  }
  text::write_file(path, out.str());
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  Dataset data;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      parse_metadata(line, data.metadata);
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw IoError(path + ": unexpected dataset header");
      header_seen = true;
      continue;
    }
    const auto cells = text::split(line, ',');
    if (cells.size() != kCsvColumns) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(kCsvColumns) + " columns");
    }
    Sample s;
    s.episode = static_cast<std::int64_t>(text::parse_double(cells[0]));
    for (std::size_t c = 0; c < kInputChannels; ++c) s.input[c] = text::parse_double(cells[1 + c]);
    for (std::size_t c = 0; c < kOutputChannels; ++c) {
      s.target[c] = text::parse_double(cells[1 + kInputChannels + c]);
    }
    data.rows.push_back(s);
  }
  if (!header_seen) throw IoError(path + ": missing dataset header");
  return data;
}

// ---------------------------------------------------------------------------
// Model JSON

namespace {

const char* mode_name(TargetMode m) {
  return m == TargetMode::kIncrement ? "increment" : "absolute";
}

TargetMode parse_mode(const std::string& s) {
  if (s == "absolute") return TargetMode::kAbsolute;
  if (s == "increment") return TargetMode::kIncrement;
  throw IoError("unknown target_mode '" + s + "'");
}

}  // namespace

std::string to_json(const Mlp& net) {
  json j;
  j["format"] = "vsglab-mlp";
  j["version"] = kModelFormatVersion;
  j["layer_dims"] = net.dims();
  j["activation"] = "tanh";
  j["target_mode"] = mode_name(net.target_mode());
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json rows = json::array();
    for (std::size_t r = 0; r < l.outputs; ++r) {
      rows.push_back(std::vector<double>(l.weights.begin() + static_cast<std::ptrdiff_t>(r * l.inputs),
                                         l.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * l.inputs)));
    }
    layers.push_back({{"weights", rows}, {"bias", l.bias}});
  }
  j["layers"] = layers;
  j["input_norm"] = {{"mean", net.input_norm.mean}, {"std", net.input_norm.stddev}};
  j["output_norm"] = {{"mean", net.output_norm.mean}, {"std", net.output_norm.stddev}};
  j["output_range"] = {{"min", net.output_min}, {"max", net.output_max}};
  const auto& t = net.training;
  j["training"] = {{"trained", t.trained},
                   {"seed", t.seed},
                   {"epochs", t.epochs},
                   {"learning_rate", t.learning_rate},
                   {"final_train_loss", t.final_train_loss},
                   {"final_validation_loss", t.final_validation_loss},
                   {"dataset", t.dataset}};
  return j.dump(1);
}

Mlp from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "vsglab-mlp") throw IoError("not a vsglab model file");
    if (j.at("version").get<int>() != kModelFormatVersion) throw IoError("unsupported model version");
    Mlp net(j.at("layer_dims").get<std::vector<std::size_t>>(),
            parse_mode(j.value("target_mode", std::string("absolute"))));
    const auto& layers = j.at("layers");
    if (layers.size() != net.layers().size()) throw IoError("layer count does not match layer_dims");
    for (std::size_t li = 0; li < layers.size(); ++li) {
      Layer& l = net.layers()[li];
      const auto rows = layers[li].at("weights").get<std::vector<std::vector<double>>>();
      const auto bias = layers[li].at("bias").get<std::vector<double>>();
      if (rows.size() != l.outputs || bias.size() != l.outputs) throw IoError("layer shape mismatch");
      for (std::size_t r = 0; r < l.outputs; ++r) {
        if (rows[r].size() != l.inputs) throw IoError("layer shape mismatch");
        for (std::size_t c = 0; c < l.inputs; ++c) l.w(r, c) = rows[r][c];
      }
      l.bias = bias;
    }
    auto read_stats = [](const json& s, std::size_t n) {
      ChannelStats out{s.at("mean").get<std::vector<double>>(), s.at("std").get<std::vector<double>>()};
      if (out.mean.size() != n || out.stddev.size() != n) throw IoError("normalization width mismatch");
      return out;
    };
    net.input_norm = read_stats(j.at("input_norm"), net.input_size());
    net.output_norm = read_stats(j.at("output_norm"), net.output_size());
    if (j.contains("output_range")) {
      net.output_min = j["output_range"].at("min").get<std::vector<double>>();
      net.output_max = j["output_range"].at("max").get<std::vector<double>>();
      if (net.output_min.size() != net.output_size() || net.output_max.size() != net.output_size()) {
        throw IoError("output range width mismatch");
      }
    }
    if (j.contains("training")) {
      const auto& t = j["training"];
      net.training.trained = t.value("trained", false);
      net.training.seed = t.value("seed", std::uint64_t{0});
      net.training.epochs = t.value("epochs", std::size_t{0});
      net.training.learning_rate = t.value("learning_rate", 0.0);
      net.training.final_train_loss = t.value("final_train_loss", 0.0);
      net.training.final_validation_loss = t.value("final_validation_loss", 0.0);
      net.training.dataset = t.value("dataset", std::string());
    }
    net.validate();
    return net;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Mlp& net, const std::string& path) { text::write_file(path, to_json(net)); }

Mlp load_model(const std::string& path) { return from_json(text::read_file(path)); }

}  // namespace vsglab::nn
