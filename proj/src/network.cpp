#include "mcgdn/network.hpp"

#include <algorithm>
#include <string>

#include "mcgdn/error.hpp"

namespace mcgdn {
namespace {

void require_finite(const Matrix &m, const char *stage) {
  if (!m.allFinite()) fail(ErrorKind::NonFiniteActivation, std::string("non-finite values in ") + stage);
}

void require_finite(const Sequence &s, const char *stage) {
  for (const auto &m : s) require_finite(m, stage);
}

}  // namespace

void zero_tensors(DenoiserModel &tensors) {
  for_each_tensor(tensors, [](std::string_view, std::span<double> t) { std::fill(t.begin(), t.end(), 0.0); });
}

const Matrix &forward_batch(const DenoiserModel &model, const Matrix &input, NetworkWorkspace &ws) {
  const auto &arch = model.arch;
  if (input.cols() != static_cast<Eigen::Index>(arch.window)) {
    fail(ErrorKind::DimensionMismatch, "segment length " + std::to_string(input.cols()) +
                                           " != model window " + std::to_string(arch.window));
  }
  conv1d_forward_batch(input, model.conv, ws.conv, ws.conv_out);
  require_finite(ws.conv_out, "conv output");
  gru_forward_batch(ws.conv_out, model.gru, ws.gru, ws.gru_out);
  require_finite(ws.gru_out, "GRU output");
  flatten_time_major(ws.gru_out, ws.flat);
  dense_forward_batch(ws.flat, model.hidden, Activation::Relu, ws.hidden, ws.hidden_out);
  require_finite(ws.hidden_out, "hidden layer");
  dense_forward_batch(ws.hidden_out, model.output, Activation::Identity, ws.output, ws.out);
  require_finite(ws.out, "output");
  return ws.out;
}

double model_forward(std::span<const double> segment, const DenoiserModel &model) {
  Matrix input(1, static_cast<Eigen::Index>(segment.size()));
  std::copy(segment.begin(), segment.end(), input.data());
  NetworkWorkspace ws;
  return forward_batch(model, input, ws)(0, 0);
}

double mse_loss(std::span<const double> pred, std::span<const double> label) {
  if (pred.empty()) fail(ErrorKind::EmptyBatch, "mse_loss on an empty batch");
  if (pred.size() != label.size()) fail(ErrorKind::LengthMismatch, "prediction/label size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - label[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double loss_and_gradients(const DenoiserModel &model, const Matrix &input, std::span<const double> labels,
                          NetworkWorkspace &ws, Gradients &grads) {
  if (input.rows() == 0) fail(ErrorKind::EmptyBatch, "gradient of an empty batch");
  if (static_cast<std::size_t>(input.rows()) != labels.size()) {
    fail(ErrorKind::LengthMismatch, "batch/label size mismatch");
  }
  if (!same_shapes(model, grads)) fail(ErrorKind::ShapeMismatch, "gradient container shape mismatch");
  const Matrix &out = forward_batch(model, input, ws);
  const auto batch = static_cast<double>(input.rows());

  ws.d_out.resize(input.rows(), 1);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < input.rows(); ++b) {
    const double diff = out(b, 0) - labels[static_cast<std::size_t>(b)];
    loss += diff * diff;
    ws.d_out(b, 0) = 2.0 * diff / batch;
  }
  loss /= batch;

  zero_tensors(grads);
  dense_backward_batch(ws.output, model.output, Activation::Identity, ws.d_out, grads.output, ws.d_hidden_out);
  dense_backward_batch(ws.hidden, model.hidden, Activation::Relu, ws.d_hidden_out, grads.hidden, ws.d_flat);
  unflatten_time_major(ws.d_flat, ws.gru_out.size(), ws.d_gru_out);
  gru_backward_batch(ws.gru, model.gru, ws.d_gru_out, grads.gru, ws.d_conv_out);
  conv1d_backward_batch(ws.conv, model.conv, ws.d_conv_out, model.arch.conv_bias, grads.conv);
  return loss;
}

Matrix batch_matrix(std::span<const SegmentExample> batch) {
  if (batch.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(batch.front().segment.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    std::copy(batch[b].segment.begin(), batch[b].segment.end(), m.row(static_cast<Eigen::Index>(b)).data());
  }
  return m;
}

Matrix batch_matrix(std::span<const Segment> batch) {
  if (batch.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(batch.front().samples.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    std::copy(batch[b].samples.begin(), batch[b].samples.end(), m.row(static_cast<Eigen::Index>(b)).data());
  }
  return m;
}

Gradients backward(const DenoiserModel &model, std::span<const SegmentExample> batch) {
  if (batch.empty()) fail(ErrorKind::EmptyBatch, "backward on an empty batch");
  std::vector<double> labels;
  labels.reserve(batch.size());
  for (const auto &e : batch) labels.push_back(e.label);
  Gradients grads = DenoiserModel::zeros(model.arch);
  NetworkWorkspace ws;
  loss_and_gradients(model, batch_matrix(batch), labels, ws, grads);
  return grads;
}

std::vector<double> predict_segments(const DenoiserModel &model, std::span<const Segment> segments,
                                     std::size_t batch_size) {
  batch_size = std::max<std::size_t>(batch_size, 1);
  std::vector<double> out;
  out.reserve(segments.size());
  NetworkWorkspace ws;
  for (std::size_t start = 0; start < segments.size(); start += batch_size) {
    auto chunk = segments.subspan(start, std::min(batch_size, segments.size() - start));
    const Matrix &pred = forward_batch(model, batch_matrix(chunk), ws);
    for (Eigen::Index b = 0; b < pred.rows(); ++b) out.push_back(pred(b, 0));
  }
  return out;
}

SampledSignal predict_cycle(const DenoiserModel &model, const McgCycle &mcg, std::size_t stride,
                            std::size_t batch_size) {
  auto segments = sequential_iter(mcg, model.arch.window, stride);
  return SampledSignal(predict_segments(model, segments, batch_size), mcg.signal.sample_rate(),
                       mcg.signal.unit());
}

double evaluate_mse(const DenoiserModel &model, const SegmentDataset &dataset, std::size_t batch_size) {
  if (dataset.empty()) fail(ErrorKind::EmptyBatch, "evaluate_mse on an empty dataset");
  batch_size = std::max<std::size_t>(batch_size, 1);
  auto examples = dataset.examples();
  NetworkWorkspace ws;
  double acc = 0.0;
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    auto chunk = examples.subspan(start, std::min(batch_size, examples.size() - start));
    const Matrix &pred = forward_batch(model, batch_matrix(chunk), ws);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      const double d = pred(static_cast<Eigen::Index>(b), 0) - chunk[b].label;
      acc += d * d;
    }
  }
  return acc / static_cast<double>(examples.size());
}

}  // namespace mcgdn
