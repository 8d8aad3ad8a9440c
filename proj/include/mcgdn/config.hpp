#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcgdn/model.hpp"
#include "mcgdn/noise.hpp"
#include "mcgdn/spectral.hpp"
#include "mcgdn/train.hpp"
#include "mcgdn/windowing.hpp"

namespace mcgdn {

/// Flat key=value run configuration with dotted section prefixes
/// (noise.beta, train.lr, ...). Lines starting with '#' are comments.
/// Unknown keys are rejected. Later layers override earlier ones:
/// defaults < config file < command-line --set / --seed.
class RunConfig {
public:
  RunConfig();  // populated with defaults

  static const std::map<std::string, std::string> &defaults();

  void merge_text(std::istream &in, const std::string &origin);
  void merge_file(const std::filesystem::path &path);
  /// Applies "key=value". Throws InvalidArgument on unknown keys.
  void set(const std::string &assignment);
  void set(const std::string &key, const std::string &value);

  const std::string &get(const std::string &key) const;
  double get_double(const std::string &key) const;
  std::uint64_t get_u64(const std::string &key) const;
  std::size_t get_size(const std::string &key) const;
  bool get_bool(const std::string &key) const;

  const std::map<std::string, std::string> &values() const noexcept { return values_; }
  /// Sorted "key=value" lines.
  std::string dump() const;

  // Typed views.
  std::uint64_t seed() const { return get_u64("seed"); }
  NoiseSpec noise_spec() const;  // noise_gain left at 1 when noise.gain=auto
  std::optional<double> explicit_noise_gain() const;
  WindowParams window() const;
  Architecture architecture() const;
  TrainConfig train_config() const;
  PsdParams psd_params() const;
  SplitFractions split() const;

private:
  std::map<std::string, std::string> values_;
};

/// Seeds for each consumer of randomness, all derived from the global seed.
struct DerivedSeeds {
  std::uint64_t noise;
  std::uint64_t split;
  std::uint64_t init;
  std::uint64_t train;
};
DerivedSeeds derive_seeds(std::uint64_t global_seed);

}  // namespace mcgdn
