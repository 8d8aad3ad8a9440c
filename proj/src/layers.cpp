#include "mcgdn/layers.hpp"

#include <string>

#include "mcgdn/error.hpp"

namespace mcgdn {
namespace {

Matrix sigmoid(const Matrix &a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

void resize_sequence(Sequence &seq, std::size_t steps, Eigen::Index rows, Eigen::Index cols) {
  seq.resize(steps);
  for (auto &m : seq) m.resize(rows, cols);
}

}  // namespace

const Sequence &conv1d_forward_batch(const Matrix &input, const Conv1dLayer &layer, ConvCache &cache,
                                     Sequence &out) {
  const Eigen::Index n = input.cols();
  const Eigen::Index m = layer.weights.cols();
  if (m > n) {
    fail(ErrorKind::DimensionMismatch, "conv kernel " + std::to_string(m) + " longer than input " +
                                           std::to_string(n));
  }
  const auto steps = static_cast<std::size_t>(n - m + 1);
  const Eigen::Index batch = input.rows();
  const Eigen::Index filters = layer.weights.rows();
  cache.input = input;
  resize_sequence(cache.pre, steps, batch, filters);
  resize_sequence(out, steps, batch, filters);
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix &pre = cache.pre[t];
    pre.noalias() = input.middleCols(static_cast<Eigen::Index>(t), m) * layer.weights.transpose();
    pre.rowwise() += layer.bias.transpose();
    out[t] = pre.cwiseMax(0.0);
  }
  return out;
}

void conv1d_backward_batch(const ConvCache &cache, const Conv1dLayer &layer, const Sequence &d_out,
                           bool with_bias, Conv1dLayer &grad) {
  const Eigen::Index m = layer.weights.cols();
  Matrix d_pre;
  for (std::size_t t = 0; t < cache.pre.size(); ++t) {
    // ReLU passes gradient only where the pre-activation is strictly positive.
    d_pre = (cache.pre[t].array() > 0.0).select(d_out[t].array(), 0.0).matrix();
    grad.weights.noalias() += d_pre.transpose() * cache.input.middleCols(static_cast<Eigen::Index>(t), m);
    if (with_bias) grad.bias += d_pre.colwise().sum().transpose();
  }
}

const Sequence &gru_forward_batch(const Sequence &input, const GruLayer &layer, GruCache &cache,
                                  Sequence &hidden_states) {
  const std::size_t steps = input.size();
  const Eigen::Index units = layer.w_hz.rows();
  if (steps == 0) fail(ErrorKind::DimensionMismatch, "GRU input sequence is empty");
  const Eigen::Index batch = input.front().rows();
  for (const auto &x : input) {
    if (x.cols() != layer.w_iz.cols() || x.rows() != batch) {
      fail(ErrorKind::DimensionMismatch, "GRU input width " + std::to_string(x.cols()) +
                                             " does not match layer width " +
                                             std::to_string(layer.w_iz.cols()));
    }
  }
  cache.input = input;
  for (Sequence *s : {&cache.h_prev, &cache.z, &cache.r, &cache.n, &cache.hn}) {
    resize_sequence(*s, steps, batch, units);
  }
  resize_sequence(hidden_states, steps, batch, units);

  const Vector bz = layer.b_iz + layer.b_hz;
  const Vector br = layer.b_ir + layer.b_hr;
  Matrix a;
  for (std::size_t t = 0; t < steps; ++t) {
    const Matrix &x = input[t];
    Matrix &hp = cache.h_prev[t];
    if (t == 0) {
      hp.setZero();
    } else {
      hp = hidden_states[t - 1];
    }

    a.noalias() = x * layer.w_iz.transpose();
    a.noalias() += hp * layer.w_hz.transpose();
    a.rowwise() += bz.transpose();
    cache.z[t] = sigmoid(a);

    a.noalias() = x * layer.w_ir.transpose();
    a.noalias() += hp * layer.w_hr.transpose();
    a.rowwise() += br.transpose();
    cache.r[t] = sigmoid(a);

    Matrix &hn = cache.hn[t];
    hn.noalias() = hp * layer.w_hn.transpose();
    hn.rowwise() += layer.b_hn.transpose();

    a.noalias() = x * layer.w_in.transpose();
    a.rowwise() += layer.b_in.transpose();
    a.array() += cache.r[t].array() * hn.array();
    cache.n[t] = a.array().tanh().matrix();

    const auto &z = cache.z[t].array();
    hidden_states[t] = ((1.0 - z) * cache.n[t].array() + z * hp.array()).matrix();
  }
  return hidden_states;
}

void gru_backward_batch(const GruCache &cache, const GruLayer &layer, const Sequence &d_hidden,
                        GruLayer &grad, Sequence &d_input) {
  const std::size_t steps = cache.input.size();
  const Eigen::Index batch = cache.input.front().rows();
  const Eigen::Index units = layer.w_hz.rows();
  resize_sequence(d_input, steps, batch, layer.w_iz.cols());

  Matrix dh_carry = Matrix::Zero(batch, units);
  Matrix dh, da_z, da_r, da_n, d_hn;
  for (std::size_t step = steps; step-- > 0;) {
    const auto &z = cache.z[step].array();
    const auto &r = cache.r[step].array();
    const auto &n = cache.n[step].array();
    const Matrix &x = cache.input[step];
    const Matrix &hp = cache.h_prev[step];

    dh = d_hidden[step] + dh_carry;
    da_n = (dh.array() * (1.0 - z) * (1.0 - n * n)).matrix();
    da_z = (dh.array() * (hp.array() - n) * z * (1.0 - z)).matrix();
    da_r = (da_n.array() * cache.hn[step].array() * r * (1.0 - r)).matrix();
    d_hn = (da_n.array() * r).matrix();

    grad.w_in.noalias() += da_n.transpose() * x;
    grad.w_ir.noalias() += da_r.transpose() * x;
    grad.w_iz.noalias() += da_z.transpose() * x;
    grad.w_hn.noalias() += d_hn.transpose() * hp;
    grad.w_hr.noalias() += da_r.transpose() * hp;
    grad.w_hz.noalias() += da_z.transpose() * hp;
    grad.b_in += da_n.colwise().sum().transpose();
    grad.b_ir += da_r.colwise().sum().transpose();
    grad.b_iz += da_z.colwise().sum().transpose();
    grad.b_hn += d_hn.colwise().sum().transpose();
    grad.b_hr += da_r.colwise().sum().transpose();
    grad.b_hz += da_z.colwise().sum().transpose();

    Matrix &dx = d_input[step];
    dx.noalias() = da_n * layer.w_in;
    dx.noalias() += da_r * layer.w_ir;
    dx.noalias() += da_z * layer.w_iz;

    dh_carry = (dh.array() * z).matrix();
    dh_carry.noalias() += d_hn * layer.w_hn;
    dh_carry.noalias() += da_r * layer.w_hr;
    dh_carry.noalias() += da_z * layer.w_hz;
  }
}

const Matrix &dense_forward_batch(const Matrix &input, const DenseLayer &layer, Activation act,
                                  DenseCache &cache, Matrix &out) {
  if (input.cols() != layer.weights.cols()) {
    fail(ErrorKind::DimensionMismatch, "dense input width " + std::to_string(input.cols()) +
                                           " does not match layer width " +
                                           std::to_string(layer.weights.cols()));
  }
  cache.input = input;
  cache.pre.noalias() = input * layer.weights.transpose();
  cache.pre.rowwise() += layer.bias.transpose();
  if (act == Activation::Relu) {
    out = cache.pre.cwiseMax(0.0);
  } else {
    out = cache.pre;
  }
  return out;
}

void dense_backward_batch(const DenseCache &cache, const DenseLayer &layer, Activation act,
                          const Matrix &d_out, DenseLayer &grad, Matrix &d_input) {
  Matrix d_pre;
  if (act == Activation::Relu) {
    d_pre = (cache.pre.array() > 0.0).select(d_out.array(), 0.0).matrix();
  } else {
    d_pre = d_out;
  }
  grad.weights.noalias() += d_pre.transpose() * cache.input;
  grad.bias += d_pre.colwise().sum().transpose();
  d_input.noalias() = d_pre * layer.weights;
}

void flatten_time_major(const Sequence &seq, Matrix &flat) {
  const Eigen::Index batch = seq.front().rows();
  const Eigen::Index units = seq.front().cols();
  flat.resize(batch, units * static_cast<Eigen::Index>(seq.size()));
  for (std::size_t t = 0; t < seq.size(); ++t) {
    flat.middleCols(static_cast<Eigen::Index>(t) * units, units) = seq[t];
  }
}

void unflatten_time_major(const Matrix &flat, std::size_t steps, Sequence &seq) {
  const Eigen::Index units = flat.cols() / static_cast<Eigen::Index>(steps);
  resize_sequence(seq, steps, flat.rows(), units);
  for (std::size_t t = 0; t < steps; ++t) {
    seq[t] = flat.middleCols(static_cast<Eigen::Index>(t) * units, units);
  }
}

Matrix conv1d_forward(std::span<const double> x, const Conv1dLayer &layer) {
  Matrix input(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) input(0, static_cast<Eigen::Index>(i)) = x[i];
  ConvCache cache;
  Sequence out;
  conv1d_forward_batch(input, layer, cache, out);
  Matrix map(static_cast<Eigen::Index>(out.size()), layer.weights.rows());
  for (std::size_t t = 0; t < out.size(); ++t) map.row(static_cast<Eigen::Index>(t)) = out[t].row(0);
  return map;
}

namespace {
Sequence rows_as_sequence(const Matrix &seq) {
  Sequence s(static_cast<std::size_t>(seq.rows()));
  for (Eigen::Index t = 0; t < seq.rows(); ++t) s[static_cast<std::size_t>(t)] = seq.row(t);
  return s;
}
Matrix stack_rows(const Sequence &seq) {
  Matrix out(static_cast<Eigen::Index>(seq.size()), seq.front().cols());
  for (std::size_t t = 0; t < seq.size(); ++t) out.row(static_cast<Eigen::Index>(t)) = seq[t].row(0);
  return out;
}
}  // namespace

Matrix gru_forward(const Matrix &seq, const GruLayer &layer) {
  GruCache cache;
  Sequence h;
  gru_forward_batch(rows_as_sequence(seq), layer, cache, h);
  return stack_rows(h);
}

GruTrace gru_forward_trace(const Matrix &seq, const GruLayer &layer) {
  GruCache cache;
  Sequence h;
  gru_forward_batch(rows_as_sequence(seq), layer, cache, h);
  return {stack_rows(cache.z), stack_rows(cache.r), stack_rows(cache.n), stack_rows(h)};
}

}  // namespace mcgdn
