#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "mcgdn/model.hpp"
#include "mcgdn/windowing.hpp"

namespace mcgdn {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::optional<double> clip_norm;  // global L2 norm

  void validate() const;
};

/// First and second moment estimates of the adaptive-moment optimizer.
struct AdamState {
  Gradients first;
  Gradients second;
  std::uint64_t step = 0;

  static AdamState fresh(const DenoiserModel &model);
};

/// One bias-corrected adaptive-moment update. Throws ShapeMismatch when
/// params, grads and state disagree.
void optimizer_step(DenoiserModel &params, const Gradients &grads, AdamState &state, const TrainConfig &config);

/// Scales grads so their global L2 norm is at most max_norm. Returns the norm
/// before scaling.
double clip_gradients(Gradients &grads, double max_norm);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;             // mean batch loss over the epoch
  std::optional<double> val_mse;      // empty without a validation set

  friend bool operator==(const EpochRecord &, const EpochRecord &) = default;
};

struct TrainResult {
  DenoiserModel model;                // parameters with the best selection loss
  std::vector<EpochRecord> history;
  std::optional<std::size_t> best_epoch;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

/// Mini-batch training on shuffled examples; epoch e is shuffled with
/// derive_seed(config.seed, "epoch", e). Selection uses the validation MSE,
/// or the training MSE when the validation set is empty. Throws
/// DivergenceDetected when a loss or activation turns non-finite.
TrainResult train(const DenoiserModel &initial, const SegmentDataset &train_set, const SegmentDataset &val_set,
                  const TrainConfig &config, const EpochCallback &on_epoch = {});

void write_history_csv(const std::filesystem::path &path, const std::vector<EpochRecord> &history);

}  // namespace mcgdn
