#include "mcgdn/model.hpp"

#include <cmath>
#include <string>

#include "mcgdn/error.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn {

void Architecture::validate() const {
  if (window == 0 || kernel == 0 || filters == 0 || hidden == 0) {
    fail(ErrorKind::ArchMismatch, "architecture sizes must be >= 1");
  }
  if (kernel > window) {
    fail(ErrorKind::ArchMismatch, "kernel " + std::to_string(kernel) + " exceeds window " +
                                      std::to_string(window));
  }
}

DenoiserModel DenoiserModel::zeros(const Architecture &arch) {
  arch.validate();
  const auto L = static_cast<Eigen::Index>(arch.filters);
  const auto m = static_cast<Eigen::Index>(arch.kernel);
  const auto H = static_cast<Eigen::Index>(arch.hidden);
  const auto F = static_cast<Eigen::Index>(arch.flat_width());
  DenoiserModel model;
  model.arch = arch;
  model.conv.weights = Matrix::Zero(L, m);
  model.conv.bias = Vector::Zero(L);
  for (Matrix *w : {&model.gru.w_iz, &model.gru.w_ir, &model.gru.w_in, &model.gru.w_hz,
                    &model.gru.w_hr, &model.gru.w_hn}) {
    *w = Matrix::Zero(L, L);
  }
  for (Vector *b : {&model.gru.b_iz, &model.gru.b_ir, &model.gru.b_in, &model.gru.b_hz,
                    &model.gru.b_hr, &model.gru.b_hn}) {
    *b = Vector::Zero(L);
  }
  model.hidden.weights = Matrix::Zero(H, F);
  model.hidden.bias = Vector::Zero(H);
  model.output.weights = Matrix::Zero(1, H);
  model.output.bias = Vector::Zero(1);
  return model;
}

DenoiserModel DenoiserModel::initialized(const Architecture &arch, std::uint64_t seed) {
  DenoiserModel model = zeros(arch);
  Rng rng(seed);
  auto fill = [&rng](Matrix &w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
  };
  const auto L = static_cast<double>(arch.filters);
  const auto m = static_cast<double>(arch.kernel);
  // Conv fans follow the usual receptive-field convention: one input channel.
  fill(model.conv.weights, m, m * L);
  for (Matrix *w : {&model.gru.w_iz, &model.gru.w_ir, &model.gru.w_in, &model.gru.w_hz,
                    &model.gru.w_hr, &model.gru.w_hn}) {
    fill(*w, L, L);
  }
  fill(model.hidden.weights, static_cast<double>(arch.flat_width()), static_cast<double>(arch.hidden));
  fill(model.output.weights, static_cast<double>(arch.hidden), 1.0);
  return model;
}

std::size_t DenoiserModel::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&n](std::string_view, std::span<const double> t) { n += t.size(); });
  return n;
}

void check_shapes(const DenoiserModel &model) {
  const DenoiserModel ref = DenoiserModel::zeros(model.arch);
  if (!same_shapes(model, ref)) fail(ErrorKind::ShapeMismatch, "model tensors do not match architecture");
}

bool same_shapes(const DenoiserModel &a, const DenoiserModel &b) {
  auto shape = [](const auto &t) { return std::pair(t.rows(), t.cols()); };
  return a.arch == b.arch && shape(a.conv.weights) == shape(b.conv.weights) &&
         shape(a.conv.bias) == shape(b.conv.bias) && shape(a.gru.w_iz) == shape(b.gru.w_iz) &&
         shape(a.gru.w_ir) == shape(b.gru.w_ir) && shape(a.gru.w_in) == shape(b.gru.w_in) &&
         shape(a.gru.w_hz) == shape(b.gru.w_hz) && shape(a.gru.w_hr) == shape(b.gru.w_hr) &&
         shape(a.gru.w_hn) == shape(b.gru.w_hn) && shape(a.gru.b_iz) == shape(b.gru.b_iz) &&
         shape(a.gru.b_ir) == shape(b.gru.b_ir) && shape(a.gru.b_in) == shape(b.gru.b_in) &&
         shape(a.gru.b_hz) == shape(b.gru.b_hz) && shape(a.gru.b_hr) == shape(b.gru.b_hr) &&
         shape(a.gru.b_hn) == shape(b.gru.b_hn) && shape(a.hidden.weights) == shape(b.hidden.weights) &&
         shape(a.hidden.bias) == shape(b.hidden.bias) && shape(a.output.weights) == shape(b.output.weights) &&
         shape(a.output.bias) == shape(b.output.bias);
}

}  // namespace mcgdn
