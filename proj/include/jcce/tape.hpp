#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "jcce/error.hpp"
#include "jcce/rng.hpp"
#include "jcce/sparse.hpp"
#include "jcce/tensor.hpp"

namespace jcce {

// Trainable tensor with its gradient buffer. Gradients are written by
// Tape::backward, which zeroes them first; has_grad marks that a backward
// pass has populated them since the last reset.
struct Parameter {
  Tensor value;
  Tensor grad;
  int id = -1;
  bool has_grad = false;

  Parameter() = default;
  Parameter(Tensor v, int id_)
      : value(std::move(v)), grad(value.rows(), value.cols()), id(id_) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& m) : Error(ErrorCode::contract, m) {}
};

// Reverse-mode tape over 2-D tensors. Record a forward computation through
// the op methods, then call backward exactly once on a scalar node; gradients
// of every reachable Parameter end up in Parameter::grad. The forward values
// and the backward pass are deterministic functions of the recorded inputs.
class Tape {
 public:
  using ValueId = int;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf bound to a trainable parameter.
  ValueId param(Parameter& p);
  // Leaf with no gradient.
  ValueId constant(Tensor t);

  // c = a * b
  ValueId matmul(ValueId a, ValueId b);
  // c = a * b^T
  ValueId matmul_nt(ValueId a, ValueId b);
  // out[r,:] = bias + sum over nonzeros (i,v) of batch[r]: v * W[i,:]
  // W is (input_dim x out_dim); gather-accumulate over one/multi-hot inputs.
  ValueId sparse_linear(ValueId w, ValueId bias,
                        const std::vector<SparseVec>& batch);
  // out = x + bias broadcast over rows; bias is 1 x n.
  ValueId add_bias(ValueId x, ValueId bias);
  ValueId relu(ValueId x);
  // Inverted dropout: survivors scaled by 1/(1-rate). Identity in inference.
  ValueId dropout(ValueId x, double rate, bool training, Rng& rng);
  ValueId add(ValueId a, ValueId b);
  ValueId sub(ValueId a, ValueId b);
  // out = alpha*a + beta*b, same shapes.
  ValueId add_scaled(ValueId a, ValueId b, double alpha, double beta);
  ValueId scale(ValueId a, double c);
  // Row-wise log(sum_j exp(s_ij)), max-subtracted; n x m -> n x 1.
  ValueId row_logsumexp(ValueId s);
  // Diagonal of a square matrix as n x 1.
  ValueId diag(ValueId s);
  // Mean over all entries -> 1 x 1.
  ValueId mean_all(ValueId x);
  // Sum of squared entries -> 1 x 1.
  ValueId sq_frobenius(ValueId x);
  // mean_i [softplus(z_i) - y_i * z_i], z n x 1, targets n x 1 in {0,1}.
  ValueId bce_with_logits_mean(ValueId z, const Tensor& targets);

  const Tensor& value(ValueId id) const { return nodes_[id].value; }
  const Tensor& grad(ValueId id) const { return nodes_[id].grad; }
  double scalar(ValueId id) const;

  // Reverse pass from a scalar loss node. Zeroes the grads of all parameters
  // on the tape first. Calling twice on the same tape is an error.
  void backward(ValueId loss);

  const std::vector<Parameter*>& parameters() const { return params_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> backprop;  // may be empty for leaves
  };

  ValueId push(Tensor value, std::function<void()> backprop = nullptr);
  Node& node(ValueId id) { return nodes_[id]; }
  void check_exists(ValueId id) const;

  std::vector<Node> nodes_;
  std::vector<Parameter*> params_;       // one entry per param node
  std::vector<ValueId> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace jcce
