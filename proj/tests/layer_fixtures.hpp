#pragma once

#include "mcgdn/layers.hpp"
#include "mcgdn/model.hpp"
#include "mcgdn/rng.hpp"

namespace mcgdn::testing {

inline void fill_random(std::span<double> t, Rng &rng, double scale) {
  for (double &v : t) v = rng.uniform(-scale, scale);
}

inline void fill_random(Matrix &m, Rng &rng, double scale) { fill_random(std::span(m.data(), m.size()), rng, scale); }
inline void fill_random(Vector &v, Rng &rng, double scale) { fill_random(std::span(v.data(), v.size()), rng, scale); }

inline DenoiserModel random_model(const Architecture &arch, std::uint64_t seed, double scale = 0.5) {
  DenoiserModel m = DenoiserModel::zeros(arch);
  Rng rng(seed);
  for_each_tensor(m, [&](std::string_view, std::span<double> t) { fill_random(t, rng, scale); });
  return m;
}

inline Sequence random_sequence(std::size_t steps, Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  Sequence s(steps);
  for (auto &m : s) {
    m.resize(rows, cols);
    fill_random(m, rng, 1.0);
  }
  return s;
}

// Weighted sum of a sequence: a linear probe loss for isolated layer checks.
inline double probe(const Sequence &out, const Sequence &weights) {
  double acc = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) acc += (out[t].array() * weights[t].array()).sum();
  return acc;
}

}  // namespace mcgdn::testing
