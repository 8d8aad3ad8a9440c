#include "mcgdn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcgdn/error.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

const std::map<std::string, std::string> &RunConfig::defaults() {
  static const std::map<std::string, std::string> table = {
      {"seed", "0"},
      {"data.ecg_csv", ""},
      {"data.dataset_dir", ""},
      {"data.source_rate", "125"},
      {"data.cycle_length", "3008"},
      {"data.sample_rate", "2000"},
      {"data.format", "binary"},
      {"noise.psd_white", "1e-18"},
      {"noise.beta", "0.5"},
      {"noise.f_knee", "250"},
      {"noise.gain", "auto"},
      {"noise.rms_ratio", "0.3"},
      {"noise.realizations", "100"},
      {"window.length", "50"},
      {"window.stride", "1"},
      {"window.alignment", "causal"},
      {"model.filters", "300"},
      {"model.kernel", "20"},
      {"model.hidden", "100"},
      {"model.conv_bias", "true"},
      {"model.path", ""},
      {"train.lr", "0.001"},
      {"train.batch_size", "64"},
      {"train.epochs", "30"},
      {"train.beta1", "0.9"},
      {"train.beta2", "0.999"},
      {"train.epsilon", "1e-8"},
      {"train.clip_norm", "none"},
      {"split.train", "0.8"},
      {"split.validation", "0.1"},
      {"eval.segment_length", "512"},
      {"eval.overlap", "0.5"},
      {"eval.band_lo", "0.02"},
      {"eval.band_hi", "0.05"},
      {"eval.ma_window", "50"},
      {"eval.mode", "model"},
      {"denoise.input", ""},
      {"denoise.cycle", "0"},
  };
  return table;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::merge_text(std::istream &in, const std::string &origin) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::InvalidArgument, origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void RunConfig::merge_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  merge_text(in, path.string());
}

void RunConfig::set(const std::string &assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorKind::InvalidArgument, "expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string &key, const std::string &value) {
  if (!defaults().contains(key)) fail(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string &RunConfig::get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string &key) const {
  const std::string &v = get(key);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    fail(ErrorKind::InvalidArgument, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string &key) const {
  const std::string &v = get(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(ErrorKind::InvalidArgument, key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

std::size_t RunConfig::get_size(const std::string &key) const { return static_cast<std::size_t>(get_u64(key)); }

bool RunConfig::get_bool(const std::string &key) const {
  const std::string &v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::InvalidArgument, key + ": expected true/false, got '" + v + "'");
}

std::string RunConfig::dump() const {
  std::ostringstream out;
  for (const auto &[k, v] : values_) out << k << '=' << v << '\n';
  return out.str();
}

NoiseSpec RunConfig::noise_spec() const {
  NoiseSpec spec;
  spec.psd_white = get_double("noise.psd_white");
  spec.beta = get_double("noise.beta");
  spec.f_knee = get_double("noise.f_knee");
  spec.noise_gain = explicit_noise_gain().value_or(1.0);
  spec.seed = derive_seeds(seed()).noise;
  spec.validate();
  return spec;
}

std::optional<double> RunConfig::explicit_noise_gain() const {
  if (get("noise.gain") == "auto") return std::nullopt;
  return get_double("noise.gain");
}

WindowParams RunConfig::window() const {
  WindowParams p;
  p.length = get_size("window.length");
  p.stride = get_size("window.stride");
  const std::string &align = get("window.alignment");
  if (align == "causal") {
    p.alignment = LabelAlignment::Causal;
  } else if (align == "centered") {
    p.alignment = LabelAlignment::Centered;
  } else {
    fail(ErrorKind::InvalidArgument, "window.alignment must be causal or centered");
  }
  if (p.length == 0 || p.stride == 0) fail(ErrorKind::InvalidArgument, "window length and stride must be >= 1");
  return p;
}

Architecture RunConfig::architecture() const {
  Architecture a;
  a.window = get_size("window.length");
  a.kernel = get_size("model.kernel");
  a.filters = get_size("model.filters");
  a.hidden = get_size("model.hidden");
  a.conv_bias = get_bool("model.conv_bias");
  a.validate();
  return a;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  c.learning_rate = get_double("train.lr");
  c.batch_size = get_size("train.batch_size");
  c.epochs = get_size("train.epochs");
  c.beta1 = get_double("train.beta1");
  c.beta2 = get_double("train.beta2");
  c.epsilon = get_double("train.epsilon");
  if (get("train.clip_norm") != "none") c.clip_norm = get_double("train.clip_norm");
  c.seed = derive_seeds(seed()).train;
  c.validate();
  return c;
}

PsdParams RunConfig::psd_params() const {
  return {get_size("eval.segment_length"), get_double("eval.overlap")};
}

SplitFractions RunConfig::split() const {
  return {get_double("split.train"), get_double("split.validation")};
}

DerivedSeeds derive_seeds(std::uint64_t global_seed) {
  return {derive_seed(global_seed, "noise", 0), derive_seed(global_seed, "split", 0),
          derive_seed(global_seed, "init", 0), derive_seed(global_seed, "train", 0)};
}

}  // namespace mcgdn
