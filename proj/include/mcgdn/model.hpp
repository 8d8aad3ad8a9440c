#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace mcgdn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Architecture {
  std::size_t window = 50;    // N, input segment length
  std::size_t kernel = 20;    // m, taps per filter
  std::size_t filters = 300;  // L, conv filters and GRU units
  std::size_t hidden = 100;   // dense hidden units
  bool conv_bias = true;

  std::size_t steps() const noexcept { return window - kernel + 1; }
  std::size_t flat_width() const noexcept { return steps() * filters; }
  /// Throws ArchMismatch on zero sizes or kernel > window.
  void validate() const;

  friend bool operator==(const Architecture &, const Architecture &) = default;
};

struct Conv1dLayer {
  Matrix weights;  // filters x kernel; weights(l, a) multiplies x[i + a]
  Vector bias;     // filters
};

// Gate blocks act on row vectors: a = x W^T + b. Hidden size equals the
// number of conv filters.
struct GruLayer {
  Matrix w_iz, w_ir, w_in;
  Matrix w_hz, w_hr, w_hn;
  Vector b_iz, b_ir, b_in;
  Vector b_hz, b_hr, b_hn;
};

struct DenseLayer {
  Matrix weights;  // outputs x inputs
  Vector bias;
};

/// Conv1D(ReLU) -> GRU(sigmoid, tanh) -> flatten (time-major) ->
/// Dense(ReLU) -> Dense(1, linear).
///
/// The same type doubles as the gradient container, so gradients mirror the
/// parameters tensor for tensor.
struct DenoiserModel {
  Architecture arch;
  Conv1dLayer conv;
  GruLayer gru;
  DenseLayer hidden;
  DenseLayer output;

  /// Every tensor sized for `arch` and filled with zeros.
  static DenoiserModel zeros(const Architecture &arch);

  /// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases.
  static DenoiserModel initialized(const Architecture &arch, std::uint64_t seed);

  std::size_t parameter_count() const;
};

using Gradients = DenoiserModel;

namespace detail {
template <typename Model, typename F>
void visit_tensors(Model &m, F &&f) {
  auto call = [&](std::string_view name, auto &t) { f(name, std::span(t.data(), static_cast<std::size_t>(t.size()))); };
  call("conv.weights", m.conv.weights);
  call("conv.bias", m.conv.bias);
  call("gru.w_iz", m.gru.w_iz);
  call("gru.w_ir", m.gru.w_ir);
  call("gru.w_in", m.gru.w_in);
  call("gru.w_hz", m.gru.w_hz);
  call("gru.w_hr", m.gru.w_hr);
  call("gru.w_hn", m.gru.w_hn);
  call("gru.b_iz", m.gru.b_iz);
  call("gru.b_ir", m.gru.b_ir);
  call("gru.b_in", m.gru.b_in);
  call("gru.b_hz", m.gru.b_hz);
  call("gru.b_hr", m.gru.b_hr);
  call("gru.b_hn", m.gru.b_hn);
  call("hidden.weights", m.hidden.weights);
  call("hidden.bias", m.hidden.bias);
  call("output.weights", m.output.weights);
  call("output.bias", m.output.bias);
}
}  // namespace detail

/// Calls f(name, span) for every parameter tensor in the canonical order
/// used by the model file: conv weights, conv bias, GRU w_iz w_ir w_in w_hz
/// w_hr w_hn, GRU b_iz b_ir b_in b_hz b_hr b_hn, hidden weights, hidden
/// bias, output weights, output bias. Matrices are row-major.
template <typename F>
void for_each_tensor(DenoiserModel &m, F &&f) {
  detail::visit_tensors(m, std::forward<F>(f));
}
template <typename F>
void for_each_tensor(const DenoiserModel &m, F &&f) {
  detail::visit_tensors(m, std::forward<F>(f));
}

/// Throws ShapeMismatch unless every tensor of `model` has the shape implied
/// by its architecture.
void check_shapes(const DenoiserModel &model);

bool same_shapes(const DenoiserModel &a, const DenoiserModel &b);

}  // namespace mcgdn
