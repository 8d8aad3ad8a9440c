#include "mcgdn/train.hpp"

#include <cmath>
#include <vector>

#include "mcgdn/error.hpp"

namespace mcgdn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorKind::InvalidArgument, "learning rate must be > 0");
  if (batch_size == 0) fail(ErrorKind::InvalidArgument, "batch size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    fail(ErrorKind::InvalidArgument, "optimizer moments require 0 <= beta < 1 and epsilon > 0");
  }
  if (clip_norm && !(*clip_norm > 0.0)) fail(ErrorKind::InvalidArgument, "clip norm must be > 0");
}

AdamState AdamState::fresh(const DenoiserModel &model) {
  return {DenoiserModel::zeros(model.arch), DenoiserModel::zeros(model.arch), 0};
}

namespace {
std::vector<std::span<double>> tensors(DenoiserModel &m) {
  std::vector<std::span<double>> out;
  for_each_tensor(m, [&out](std::string_view, std::span<double> t) { out.push_back(t); });
  return out;
}
std::vector<std::span<const double>> tensors(const DenoiserModel &m) {
  std::vector<std::span<const double>> out;
  for_each_tensor(m, [&out](std::string_view, std::span<const double> t) { out.push_back(t); });
  return out;
}
}  // namespace

void optimizer_step(DenoiserModel &params, const Gradients &grads, AdamState &state, const TrainConfig &config) {
  if (!same_shapes(params, grads) || !same_shapes(params, state.first) || !same_shapes(params, state.second)) {
    fail(ErrorKind::ShapeMismatch, "optimizer_step: parameter, gradient and state shapes differ");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  auto p = tensors(params);
  auto g = tensors(grads);
  auto m1 = tensors(state.first);
  auto m2 = tensors(state.second);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      const double gi = g[k][i];
      m1[k][i] = config.beta1 * m1[k][i] + (1.0 - config.beta1) * gi;
      m2[k][i] = config.beta2 * m2[k][i] + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m1[k][i] / correction1;
      const double v_hat = m2[k][i] / correction2;
      p[k][i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

double clip_gradients(Gradients &grads, double max_norm) {
  double sq = 0.0;
  for_each_tensor(grads, [&sq](std::string_view, std::span<const double> t) {
    for (double v : t) sq += v * v;
  });
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for_each_tensor(grads, [scale](std::string_view, std::span<double> t) {
      for (double &v : t) v *= scale;
    });
  }
  return norm;
}

}  // namespace mcgdn
