#include "mcgdn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mcgdn/error.hpp"
#include "mcgdn/network.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn {

TrainResult train(const DenoiserModel &initial, const SegmentDataset &train_set, const SegmentDataset &val_set,
                  const TrainConfig &config, const EpochCallback &on_epoch) {
  config.validate();
  if (train_set.empty()) fail(ErrorKind::EmptyBatch, "training set is empty");
  check_shapes(initial);

  TrainResult result{initial, {}, std::nullopt};
  DenoiserModel model = initial;
  AdamState state = AdamState::fresh(model);
  Gradients grads = DenoiserModel::zeros(model.arch);
  NetworkWorkspace ws;
  double best = std::numeric_limits<double>::infinity();

  const std::size_t n = train_set.size();
  const std::size_t window = train_set.params().length;
  Matrix input;
  std::vector<double> labels;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffle_permutation(n, derive_seed(config.seed, "epoch", epoch));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      input.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(window));
      labels.resize(count);
      for (std::size_t b = 0; b < count; ++b) {
        const auto &ex = train_set[order[start + b]];
        std::copy(ex.segment.begin(), ex.segment.end(), input.row(static_cast<Eigen::Index>(b)).data());
        labels[b] = ex.label;
      }
      double loss = 0.0;
      try {
        loss = loss_and_gradients(model, input, labels, ws, grads);
      } catch (const Error &e) {
        if (e.kind() == ErrorKind::NonFiniteActivation) {
          fail(ErrorKind::DivergenceDetected, "epoch " + std::to_string(epoch) + ": " + e.what());
        }
        throw;
      }
      if (!std::isfinite(loss)) {
        fail(ErrorKind::DivergenceDetected, "non-finite training loss in epoch " + std::to_string(epoch));
      }
      if (config.clip_norm) clip_gradients(grads, *config.clip_norm);
      optimizer_step(model, grads, state, config);
      loss_sum += loss * static_cast<double>(count);
    }

    EpochRecord record{epoch, loss_sum / static_cast<double>(n), std::nullopt};
    if (!val_set.empty()) {
      try {
        record.val_mse = evaluate_mse(model, val_set);
      } catch (const Error &e) {
        if (e.kind() == ErrorKind::NonFiniteActivation) {
          fail(ErrorKind::DivergenceDetected, "validation in epoch " + std::to_string(epoch) + ": " + e.what());
        }
        throw;
      }
      if (!std::isfinite(*record.val_mse)) {
        fail(ErrorKind::DivergenceDetected, "non-finite validation loss in epoch " + std::to_string(epoch));
      }
    }
    const double selection = record.val_mse.value_or(record.train_mse);
    if (selection < best) {
      best = selection;
      result.model = model;
      result.best_epoch = epoch;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

void write_history_csv(const std::filesystem::path &path, const std::vector<EpochRecord> &history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "epoch,train_mse,val_mse\n";
  char buf[64];
  for (const auto &r : history) {
    out << r.epoch << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.train_mse);
    out << buf << ',';
    if (r.val_mse) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.val_mse);
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace mcgdn
