#include "jcce/loss.hpp"

#include <algorithm>
#include <cmath>

namespace jcce {

namespace {

void check_pairing(const Tensor& x, const Tensor& y) {
  if (!x.same_shape(y) || x.rows() == 0)
    throw DimensionError("paired embeddings must share a nonempty N x E shape");
}

}  // namespace

double npairs_value(const Tensor& x, const Tensor& y, const LossConfig& cfg) {
  check_pairing(x, y);
  const size_t n = x.rows(), e = x.cols();
  double ce = 0.0, norms = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double max_s = -1e300;
    std::vector<double> scores(n);
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < e; ++k) s += x(i, k) * y(j, k);
      scores[j] = s;
      max_s = std::max(max_s, s);
    }
    double z = 0.0;
    for (size_t j = 0; j < n; ++j) z += std::exp(scores[j] - max_s);
    ce += max_s + std::log(z) - scores[i];
    for (size_t k = 0; k < e; ++k)
      norms += x(i, k) * x(i, k) + y(i, k) * y(i, k);
  }
  const double nd = static_cast<double>(n);
  const double reg_w =
      cfg.reg_scope == RegScope::per_example ? cfg.lambda / nd : cfg.lambda;
  return ce / nd + reg_w * norms;
}

Tape::ValueId npairs_loss(Tape& tape, Tape::ValueId x, Tape::ValueId y,
                          const LossConfig& cfg) {
  check_pairing(tape.value(x), tape.value(y));
  const double nd = static_cast<double>(tape.value(x).rows());
  Tape::ValueId scores = tape.matmul_nt(x, y);
  Tape::ValueId ce =
      tape.mean_all(tape.sub(tape.row_logsumexp(scores), tape.diag(scores)));
  if (cfg.lambda == 0.0) return ce;
  Tape::ValueId norms = tape.add(tape.sq_frobenius(x), tape.sq_frobenius(y));
  const double reg_w =
      cfg.reg_scope == RegScope::per_example ? cfg.lambda / nd : cfg.lambda;
  return tape.add_scaled(ce, norms, 1.0, reg_w);
}

double jcce_loss_value(const Tensor& context, const Tensor& content,
                       const LossConfig& cfg) {
  return npairs_value(context, content, cfg) +
         npairs_value(content, context, cfg);
}

Tape::ValueId jcce_loss(Tape& tape, Tape::ValueId context, Tape::ValueId content,
                        const LossConfig& cfg) {
  return tape.add(npairs_loss(tape, context, content, cfg),
                  npairs_loss(tape, content, context, cfg));
}

}  // namespace jcce
