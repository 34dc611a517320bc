#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "jcce/tensor.hpp"

namespace jcce {

struct TsneConfig {
  uint64_t seed = 42;
  double perplexity = 30.0;
  size_t iterations = 1000;  // at least 250 (exaggeration phase must finish)
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  size_t exaggeration_until = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  size_t momentum_switch = 250;
  void validate(size_t n) const;
};

struct TsneResult {
  Tensor coords;  // n x 2
  // (iteration, KL vs the true affinities) every 50 iterations and at the end.
  std::vector<std::pair<size_t, double>> kl_checkpoints;
};

// Pairwise cosine distances 1 - cos(u, v): symmetric, zero diagonal, entries
// in [0, 2]. Zero-norm rows are an error.
Tensor cosine_distances(const Tensor& points);

// Row-stochastic conditional affinities over a distance matrix: each row's
// bandwidth is binary-searched until the row entropy matches the perplexity.
Tensor conditional_affinities(const Tensor& distances, double perplexity);

// Exact quadratic-cost projection to 2-D over the cosine-distance matrix:
// symmetrized affinities, Student-t low-dimensional kernel, gradient descent
// with early exaggeration, momentum schedule and per-coordinate gains.
// Deterministic for a given seed; capped at 5000 points.
TsneResult tsne_project(const Tensor& points, const TsneConfig& cfg);

}  // namespace jcce
