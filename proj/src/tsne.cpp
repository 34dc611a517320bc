#include "jcce/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "jcce/error.hpp"
#include "jcce/rng.hpp"

namespace jcce {

void TsneConfig::validate(size_t n) const {
  if (n < 4) throw ConfigError("projection needs at least 4 points");
  if (n > 5000)
    throw ConfigError("exact projection is capped at 5000 points, got " +
                      std::to_string(n));
  if (perplexity <= 0.0 ||
      perplexity >= static_cast<double>(n - 1) / 3.0)
    throw ConfigError("perplexity must be in (0, (n-1)/3)");
  if (iterations < exaggeration_until)
    throw ConfigError("iteration budget must cover the exaggeration phase");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (early_exaggeration < 1.0)
    throw ConfigError("exaggeration factor must be at least 1");
}

Tensor cosine_distances(const Tensor& points) {
  const size_t n = points.rows(), e = points.cols();
  std::vector<double> norms(n);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = points.row(i);
    for (size_t k = 0; k < e; ++k) s += row[k] * row[k];
    if (s == 0.0)
      throw DataError("zero-norm row " + std::to_string(i) +
                      " has no cosine distance");
    norms[i] = std::sqrt(s);
  }
  Tensor d(n, n);
  const int64_t ni = static_cast<int64_t>(n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < ni; ++i) {
    const double* ri = points.row(i);
    for (size_t j = 0; j < n; ++j) {
      if (static_cast<size_t>(i) == j) continue;
      double dot = 0.0;
      const double* rj = points.row(j);
      for (size_t k = 0; k < e; ++k) dot += ri[k] * rj[k];
      const double cos = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      d(i, j) = 1.0 - cos;
    }
  }
  return d;
}

Tensor conditional_affinities(const Tensor& distances, double perplexity) {
  const size_t n = distances.rows();
  const double target = std::log(perplexity);
  Tensor p(n, n);
  for (size_t i = 0; i < n; ++i) {
    double beta = 1.0, beta_lo = 0.0, beta_hi = 1e308;
    std::vector<double> row(n);
    for (int step = 0; step < 200; ++step) {
      double sum = 0.0;
      for (size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * distances(i, j));
        sum += row[j];
      }
      // Entropy of the normalized row: log(sum) + beta * E[d].
      double weighted = 0.0;
      for (size_t j = 0; j < n; ++j)
        if (j != i) weighted += row[j] * distances(i, j);
      const double entropy = std::log(sum) + beta * weighted / sum;
      const double diff = entropy - target;
      if (std::fabs(diff) < 1e-7) break;
      if (diff > 0) {  // too flat: sharpen
        beta_lo = beta;
        beta = beta_hi >= 1e308 ? beta * 2.0 : (beta + beta_hi) / 2.0;
      } else {
        beta_hi = beta;
        beta = (beta + beta_lo) / 2.0;
      }
    }
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += row[j];
    for (size_t j = 0; j < n; ++j) p(i, j) = row[j] / sum;
  }
  return p;
}

namespace {

Tensor symmetrized_affinities(const Tensor& conditional) {
  const size_t n = conditional.rows();
  Tensor p(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p(i, j) = std::max(
          (conditional(i, j) + conditional(j, i)) / (2.0 * static_cast<double>(n)),
          1e-12);
    }
  return p;
}

// Student-t numerators and their total mass for the current layout.
double q_numerators(const Tensor& y, Tensor& qnum) {
  const size_t n = y.rows();
  double z = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = y(i, 0) - y(j, 0);
      const double dy = y(i, 1) - y(j, 1);
      qnum(i, j) = 1.0 / (1.0 + dx * dx + dy * dy);
      z += qnum(i, j);
    }
  return z;
}

double kl_divergence(const Tensor& p, const Tensor& qnum, double z) {
  const size_t n = p.rows();
  double kl = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(qnum(i, j) / z, 1e-12);
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

}  // namespace

TsneResult tsne_project(const Tensor& points, const TsneConfig& cfg) {
  const size_t n = points.rows();
  cfg.validate(n);

  const Tensor distances = cosine_distances(points);
  const Tensor p_true =
      symmetrized_affinities(conditional_affinities(distances, cfg.perplexity));

  Tensor y(n, 2);
  {
    Rng rng(derive_seed(cfg.seed, "tsne:init"));
    // Box-Muller standard normals scaled down to a tight start.
    for (size_t i = 0; i < y.size(); ++i) {
      const double u1 = 1.0 - rng.uniform();
      const double u2 = rng.uniform();
      y.at(i) = 1e-4 * std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * 3.141592653589793 * u2);
    }
  }

  Tensor increment(n, 2), gains(n, 2, 1.0), grad(n, 2), qnum(n, n);
  TsneResult result;

  for (size_t iter = 1; iter <= cfg.iterations; ++iter) {
    const double exaggeration =
        iter <= cfg.exaggeration_until ? cfg.early_exaggeration : 1.0;
    const double momentum =
        iter <= cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;

    const double z = q_numerators(y, qnum);
    grad.fill(0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(qnum(i, j) / z, 1e-12);
        const double mult =
            4.0 * (exaggeration * p_true(i, j) - q) * qnum(i, j);
        grad(i, 0) += mult * (y(i, 0) - y(j, 0));
        grad(i, 1) += mult * (y(i, 1) - y(j, 1));
      }

    for (size_t i = 0; i < y.size(); ++i) {
      const bool same_sign = (grad.at(i) > 0.0) == (increment.at(i) > 0.0);
      gains.at(i) = same_sign ? std::max(gains.at(i) * 0.8, 0.01)
                              : gains.at(i) + 0.2;
      increment.at(i) =
          momentum * increment.at(i) - cfg.learning_rate * gains.at(i) * grad.at(i);
      y.at(i) += increment.at(i);
    }
    double mean0 = 0.0, mean1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mean0 += y(i, 0);
      mean1 += y(i, 1);
    }
    mean0 /= static_cast<double>(n);
    mean1 /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
      y(i, 0) -= mean0;
      y(i, 1) -= mean1;
    }

    if (iter % 50 == 0 || iter == cfg.iterations) {
      const double zc = q_numerators(y, qnum);
      result.kl_checkpoints.push_back({iter, kl_divergence(p_true, qnum, zc)});
    }
  }

  result.coords = std::move(y);
  return result;
}

}  // namespace jcce
