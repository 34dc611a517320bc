#pragma once

#include "jcce/tape.hpp"
#include "jcce/tensor.hpp"

namespace jcce {

// Where the embedding-norm penalty sits relative to the batch mean. The
// default keeps lambda*(|x_i|^2+|y_i|^2) inside the per-example average;
// batch_sum applies lambda to the summed norms instead (an equally defensible
// reading that differs by a factor of N).
enum class RegScope { per_example, batch_sum };

struct LossConfig {
  double lambda = 1e-3;
  RegScope reg_scope = RegScope::per_example;
};

// One direction of the batched contrastive objective over paired rows:
// mean_i[-log(exp(x_i.y_i) / sum_j exp(x_i.y_j))] plus the norm penalty.
double npairs_value(const Tensor& x, const Tensor& y, const LossConfig& cfg);
Tape::ValueId npairs_loss(Tape& tape, Tape::ValueId x, Tape::ValueId y,
                          const LossConfig& cfg);

// Symmetric objective: both directions summed, context rows paired with
// content rows.
double jcce_loss_value(const Tensor& context, const Tensor& content,
                       const LossConfig& cfg);
Tape::ValueId jcce_loss(Tape& tape, Tape::ValueId context, Tape::ValueId content,
                        const LossConfig& cfg);

}  // namespace jcce
