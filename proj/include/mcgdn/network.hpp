#pragma once

#include <span>
#include <vector>

#include "mcgdn/layers.hpp"
#include "mcgdn/model.hpp"
#include "mcgdn/signal.hpp"
#include "mcgdn/windowing.hpp"

namespace mcgdn {

/// Scratch state for batched passes. Reusing one workspace across batches of
/// the same size avoids reallocating every intermediate.
struct NetworkWorkspace {
  ConvCache conv;
  GruCache gru;
  DenseCache hidden, output;
  Sequence conv_out, gru_out;
  Matrix flat, hidden_out, out;

  Sequence d_gru_out, d_conv_out;
  Matrix d_flat, d_hidden_out, d_out, d_output_in;
};

/// Forward pass over a batch (one segment per row). Returns batch x 1.
/// Throws DimensionMismatch on width != arch.window and NonFiniteActivation
/// if any stage yields NaN or Inf.
const Matrix &forward_batch(const DenoiserModel &model, const Matrix &input, NetworkWorkspace &ws);

double model_forward(std::span<const double> segment, const DenoiserModel &model);

/// Mean of squared differences. Throws EmptyBatch or LengthMismatch.
double mse_loss(std::span<const double> pred, std::span<const double> label);

/// Loss of the batch and exact gradients of it with respect to every
/// parameter. `grads` is overwritten and must have the model's shapes.
double loss_and_gradients(const DenoiserModel &model, const Matrix &input, std::span<const double> labels,
                          NetworkWorkspace &ws, Gradients &grads);

/// MSE gradients over a batch of examples.
Gradients backward(const DenoiserModel &model, std::span<const SegmentExample> batch);

Matrix batch_matrix(std::span<const SegmentExample> batch);
Matrix batch_matrix(std::span<const Segment> batch);

std::vector<double> predict_segments(const DenoiserModel &model, std::span<const Segment> segments,
                                     std::size_t batch_size = 256);

/// Model output over the sequential segments of `mcg`. With stride 1 the
/// result has L - N + 1 samples aligned to ecg[N-1 ..] under the causal label
/// convention.
SampledSignal predict_cycle(const DenoiserModel &model, const McgCycle &mcg, std::size_t stride = 1,
                            std::size_t batch_size = 256);

double evaluate_mse(const DenoiserModel &model, const SegmentDataset &dataset, std::size_t batch_size = 256);

void zero_tensors(DenoiserModel &tensors);

}  // namespace mcgdn
