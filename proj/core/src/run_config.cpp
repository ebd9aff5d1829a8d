#include "emoadapt/run_config.hpp"

#include <cmath>
#include <sstream>

#include "emoadapt/io.hpp"

namespace emoadapt {
namespace {

enum class Kind { integer, real, boolean, text };

const std::map<std::string, std::pair<Kind, std::string>>& schema() {
  static const std::map<std::string, std::pair<Kind, std::string>> s = {
      {"adapt.epochs", {Kind::integer, "8"}},
      {"data.gradient_amplitude", {Kind::real, "0.35"}},
      {"data.inversion_probability", {Kind::real, "0.5"}},
      {"data.source_test_per_class", {Kind::integer, "50"}},
      {"data.source_train_per_class", {Kind::integer, "500"}},
      {"data.target_test_per_class", {Kind::integer, "50"}},
      {"data.target_train_per_class", {Kind::integer, "200"}},
      {"data.translation", {Kind::integer, "4"}},
      {"loss.epsilon_log", {Kind::real, "1e-12"}},
      {"loss.lambda", {Kind::real, "0.0001"}},
      {"loss.w_classifier", {Kind::real, "1"}},
      {"loss.w_discrepancy", {Kind::real, "1"}},
      {"model.attention", {Kind::boolean, "true"}},
      {"model.attention_hidden", {Kind::integer, "4"}},
      {"model.conv1_filters", {Kind::integer, "8"}},
      {"model.conv2_filters", {Kind::integer, "16"}},
      {"model.dropout", {Kind::real, "0.5"}},
      {"model.fc1_units", {Kind::integer, "128"}},
      {"model.fc2_units", {Kind::integer, "64"}},
      {"model.input_size", {Kind::integer, "48"}},
      {"paths.data", {Kind::text, ""}},
      {"pretrain.epochs", {Kind::integer, "6"}},
      {"seed", {Kind::integer, "1"}},
      {"train.batch_size", {Kind::integer, "32"}},
      {"train.lr", {Kind::real, "0.001"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [key, entry] : schema()) values_[key] = entry.second;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown config key '" + key + "'");
  const std::string value = trim(raw);
  std::size_t used = 0;
  try {
    switch (it->second.first) {
      case Kind::integer: {
        if (value.empty() || value[0] == '-') throw std::invalid_argument(value);
        std::stoull(value, &used);
        break;
      }
      case Kind::real: {
        double v = std::stod(value, &used);
        if (!std::isfinite(v)) throw std::invalid_argument(value);
        break;
      }
      case Kind::boolean:
        if (value != "true" && value != "false") throw std::invalid_argument(value);
        used = value.size();
        break;
      case Kind::text:
        used = value.size();
        break;
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
  }
  if (used != value.size()) throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value, got '" + t + "'");
    }
    cfg.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: '" + path.string() + "'");
  return parse(read_text_file(path));
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

double RunConfig::real(const std::string& key) const { return std::stod(get(key)); }

std::size_t RunConfig::count(const std::string& key) const { return static_cast<std::size_t>(std::stoull(get(key))); }

std::uint64_t RunConfig::seed() const { return std::stoull(get("seed")); }

std::filesystem::path RunConfig::data_dir() const { return get("paths.data"); }

ModelConfig RunConfig::model() const {
  ModelConfig m;
  m.input_size = count("model.input_size");
  m.conv1_filters = count("model.conv1_filters");
  m.conv2_filters = count("model.conv2_filters");
  m.fc1_units = count("model.fc1_units");
  m.fc2_units = count("model.fc2_units");
  m.dropout_rate = real("model.dropout");
  m.attention = get("model.attention") == "true";
  m.attention_hidden = count("model.attention_hidden");
  m.validate();
  return m;
}

LossConfig RunConfig::loss() const {
  LossConfig l;
  l.lambda = real("loss.lambda");
  l.w_classifier = real("loss.w_classifier");
  l.w_discrepancy = real("loss.w_discrepancy");
  l.epsilon_log = real("loss.epsilon_log");
  l.validate();
  return l;
}

TrainRunConfig RunConfig::pretrain_run() const {
  TrainRunConfig r;
  r.epochs = count("pretrain.epochs");
  r.batch_size = count("train.batch_size");
  r.lr = real("train.lr");
  r.seed = seed();
  r.loss = loss();
  r.validate();
  return r;
}

TrainRunConfig RunConfig::adapt_run() const {
  TrainRunConfig r = pretrain_run();
  r.epochs = count("adapt.epochs");
  return r;
}

DomainShift RunConfig::shift() const {
  DomainShift s;
  s.gradient_amplitude = real("data.gradient_amplitude");
  s.inversion_probability = real("data.inversion_probability");
  s.translation = static_cast<int>(count("data.translation"));
  return s;
}

}  // namespace emoadapt
