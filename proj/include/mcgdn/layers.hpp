#pragma once

#include <vector>

#include "mcgdn/model.hpp"

// Batched layer kernels. A batch is laid out with one example per row. A
// sequence is a vector of T matrices (one per time step), each batch x L.
// Every forward pass records what its backward pass needs in a cache that
// can be reused across calls of the same shape.

namespace mcgdn {

using Sequence = std::vector<Matrix>;

struct ConvCache {
  Matrix input;         // batch x N
  Sequence pre;         // pre-activations per output position
};

/// out[t](b, l) = relu(bias_l + sum_a w(l, a) * x(b, t + a)), t = 0..N-m.
const Sequence &conv1d_forward_batch(const Matrix &input, const Conv1dLayer &layer, ConvCache &cache,
                                     Sequence &out);

/// Accumulates weight/bias gradients into `grad`. Bias gradient is only
/// accumulated when `with_bias` is set.
void conv1d_backward_batch(const ConvCache &cache, const Conv1dLayer &layer, const Sequence &d_out,
                           bool with_bias, Conv1dLayer &grad);

struct GruCache {
  Sequence input, h_prev, z, r, n, hn;  // hn = h_prev W_hn^T + b_hn
};

/// Runs the recurrence from h0 = 0 and returns every hidden state.
const Sequence &gru_forward_batch(const Sequence &input, const GruLayer &layer, GruCache &cache,
                                  Sequence &hidden_states);

/// Back-propagates through time. d_hidden[t] is dLoss/dh_t from outside the
/// recurrence. Accumulates into `grad` and writes dLoss/dinput into d_input.
void gru_backward_batch(const GruCache &cache, const GruLayer &layer, const Sequence &d_hidden,
                        GruLayer &grad, Sequence &d_input);

enum class Activation { Identity, Relu };

struct DenseCache {
  Matrix input;
  Matrix pre;
};

const Matrix &dense_forward_batch(const Matrix &input, const DenseLayer &layer, Activation act,
                                  DenseCache &cache, Matrix &out);

/// Accumulates into `grad`; returns dLoss/dinput in d_input.
void dense_backward_batch(const DenseCache &cache, const DenseLayer &layer, Activation act,
                          const Matrix &d_out, DenseLayer &grad, Matrix &d_input);

/// Time-major flatten: flat(b, t * L + l) = seq[t](b, l).
void flatten_time_major(const Sequence &seq, Matrix &flat);
void unflatten_time_major(const Matrix &flat, std::size_t steps, Sequence &seq);

// Single-example conveniences.

/// (N - m + 1) x L feature map of one segment.
Matrix conv1d_forward(std::span<const double> x, const Conv1dLayer &layer);

/// T x L hidden states for a T x L input sequence.
Matrix gru_forward(const Matrix &seq, const GruLayer &layer);

struct GruTrace {
  Matrix z, r, n, h;  // each T x L
};
GruTrace gru_forward_trace(const Matrix &seq, const GruLayer &layer);

}  // namespace mcgdn
