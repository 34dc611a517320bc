#include "jcce/tape.hpp"

#include <algorithm>
#include <cmath>

#include "jcce/kernels.hpp"

namespace jcce {

namespace {

void accumulate(Tensor& dst, const Tensor& src) {
  for (size_t i = 0; i < dst.size(); ++i) dst.at(i) += src.at(i);
}

}  // namespace

Tape::ValueId Tape::push(Tensor value, std::function<void()> backprop) {
  Node n;
  n.value = std::move(value);
  n.grad = Tensor(n.value.rows(), n.value.cols());
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return static_cast<ValueId>(nodes_.size() - 1);
}

void Tape::check_exists(ValueId id) const {
  if (id < 0 || id >= static_cast<ValueId>(nodes_.size()))
    throw ContractError("tape node id out of range");
}

Tape::ValueId Tape::param(Parameter& p) {
  ValueId id = push(p.value);
  params_.push_back(&p);
  param_nodes_.push_back(id);
  return id;
}

Tape::ValueId Tape::constant(Tensor t) { return push(std::move(t)); }

Tape::ValueId Tape::matmul(ValueId a, ValueId b) {
  check_exists(a);
  check_exists(b);
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (ta.cols() != tb.rows())
    throw DimensionError("matmul shape mismatch: " + ta.shape_str() + " x " +
                         tb.shape_str());
  const size_t m = ta.rows(), k = ta.cols(), n = tb.cols();
  Tensor out(m, n);
  kernels::mm_nn(ta.data(), tb.data(), out.data(), m, k, n);
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, a, b, id, m, k, n]() {
    const Tensor& g = nodes_[id].grad;
    Tensor da(m, k), db(k, n);
    kernels::mm_nt(g.data(), nodes_[b].value.data(), da.data(), m, n, k);
    kernels::mm_tn(nodes_[a].value.data(), g.data(), db.data(), k, m, n);
    accumulate(nodes_[a].grad, da);
    accumulate(nodes_[b].grad, db);
  };
  return id;
}

Tape::ValueId Tape::matmul_nt(ValueId a, ValueId b) {
  check_exists(a);
  check_exists(b);
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (ta.cols() != tb.cols())
    throw DimensionError("matmul_nt shape mismatch: " + ta.shape_str() + " x " +
                         tb.shape_str() + "^T");
  const size_t m = ta.rows(), k = ta.cols(), n = tb.rows();
  Tensor out(m, n);
  kernels::mm_nt(ta.data(), tb.data(), out.data(), m, k, n);
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, a, b, id, m, k, n]() {
    // s = a * b^T: da = g * b; db = g^T * a
    const Tensor& g = nodes_[id].grad;
    Tensor da(m, k), db(n, k);
    kernels::mm_nn(g.data(), nodes_[b].value.data(), da.data(), m, n, k);
    kernels::mm_tn(g.data(), nodes_[a].value.data(), db.data(), n, m, k);
    accumulate(nodes_[a].grad, da);
    accumulate(nodes_[b].grad, db);
  };
  return id;
}

Tape::ValueId Tape::sparse_linear(ValueId w, ValueId bias,
                                  const std::vector<SparseVec>& batch) {
  check_exists(w);
  check_exists(bias);
  const Tensor& tw = nodes_[w].value;
  const Tensor& tb = nodes_[bias].value;
  const size_t in_dim = tw.rows(), out_dim = tw.cols();
  if (tb.rows() != 1 || tb.cols() != out_dim)
    throw DimensionError("sparse_linear bias must be 1x" +
                         std::to_string(out_dim) + ", got " + tb.shape_str());
  for (const SparseVec& v : batch)
    if (v.dim != in_dim)
      throw DimensionError("sparse_linear input dim " + std::to_string(v.dim) +
                           " does not match weight rows " +
                           std::to_string(in_dim));
  const size_t nrows = batch.size();
  Tensor out(nrows, out_dim);
  for (size_t r = 0; r < nrows; ++r) {
    double* orow = out.row(r);
    for (size_t j = 0; j < out_dim; ++j) orow[j] = tb.at(j);
    const SparseVec& v = batch[r];
    for (size_t e = 0; e < v.nnz(); ++e) {
      const double val = v.values[e];
      const double* wrow = tw.row(v.indices[e]);
      for (size_t j = 0; j < out_dim; ++j) orow[j] += val * wrow[j];
    }
  }
  ValueId id = push(std::move(out));
  auto batch_copy = std::make_shared<std::vector<SparseVec>>(batch);
  nodes_[id].backprop = [this, w, bias, id, batch_copy, out_dim]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& gw = nodes_[w].grad;
    Tensor& gb = nodes_[bias].grad;
    for (size_t r = 0; r < batch_copy->size(); ++r) {
      const double* grow = g.row(r);
      for (size_t j = 0; j < out_dim; ++j) gb.at(j) += grow[j];
      const SparseVec& v = (*batch_copy)[r];
      for (size_t e = 0; e < v.nnz(); ++e) {
        const double val = v.values[e];
        double* gwrow = gw.row(v.indices[e]);
        for (size_t j = 0; j < out_dim; ++j) gwrow[j] += val * grow[j];
      }
    }
  };
  return id;
}

Tape::ValueId Tape::add_bias(ValueId x, ValueId bias) {
  check_exists(x);
  check_exists(bias);
  const Tensor& tx = nodes_[x].value;
  const Tensor& tb = nodes_[bias].value;
  if (tb.rows() != 1 || tb.cols() != tx.cols())
    throw DimensionError("add_bias shape mismatch: " + tx.shape_str() + " + " +
                         tb.shape_str());
  Tensor out(tx.rows(), tx.cols());
  kernels::add_bias_rows(tx.data(), tb.data(), out.data(), tx.rows(),
                         tx.cols());
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, x, bias, id]() {
    const Tensor& g = nodes_[id].grad;
    accumulate(nodes_[x].grad, g);
    Tensor gb(1, g.cols());
    kernels::col_sums(g.data(), gb.data(), g.rows(), g.cols());
    accumulate(nodes_[bias].grad, gb);
  };
  return id;
}

Tape::ValueId Tape::relu(ValueId x) {
  check_exists(x);
  const Tensor& tx = nodes_[x].value;
  Tensor out(tx.rows(), tx.cols());
  kernels::relu(tx.data(), out.data(), tx.size());
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, x, id]() {
    const Tensor& g = nodes_[id].grad;
    const Tensor& in = nodes_[x].value;
    Tensor& gx = nodes_[x].grad;
    // subgradient at exactly 0 is defined as 0
    for (size_t i = 0; i < g.size(); ++i)
      if (in.at(i) > 0.0) gx.at(i) += g.at(i);
  };
  return id;
}

Tape::ValueId Tape::dropout(ValueId x, double rate, bool training, Rng& rng) {
  check_exists(x);
  if (!(rate >= 0.0 && rate < 1.0))
    throw ConfigError("dropout rate must be in [0,1), got " +
                      std::to_string(rate));
  const Tensor& tx = nodes_[x].value;
  if (!training || rate == 0.0) {
    Tensor out = tx;
    ValueId id = push(std::move(out));
    nodes_[id].backprop = [this, x, id]() {
      accumulate(nodes_[x].grad, nodes_[id].grad);
    };
    return id;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  auto mask = std::make_shared<Tensor>(tx.rows(), tx.cols());
  Tensor out(tx.rows(), tx.cols());
  for (size_t i = 0; i < tx.size(); ++i) {
    const double m = rng.uniform() < rate ? 0.0 : keep_scale;
    mask->at(i) = m;
    out.at(i) = tx.at(i) * m;
  }
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, x, id, mask]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < g.size(); ++i) gx.at(i) += g.at(i) * mask->at(i);
  };
  return id;
}

Tape::ValueId Tape::add(ValueId a, ValueId b) { return add_scaled(a, b, 1.0, 1.0); }

Tape::ValueId Tape::sub(ValueId a, ValueId b) { return add_scaled(a, b, 1.0, -1.0); }

Tape::ValueId Tape::add_scaled(ValueId a, ValueId b, double alpha, double beta) {
  check_exists(a);
  check_exists(b);
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (!ta.same_shape(tb))
    throw DimensionError("elementwise shape mismatch: " + ta.shape_str() +
                         " vs " + tb.shape_str());
  Tensor out(ta.rows(), ta.cols());
  for (size_t i = 0; i < out.size(); ++i)
    out.at(i) = alpha * ta.at(i) + beta * tb.at(i);
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, a, b, id, alpha, beta]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = nodes_[a].grad;
    Tensor& gb = nodes_[b].grad;
    for (size_t i = 0; i < g.size(); ++i) {
      ga.at(i) += alpha * g.at(i);
      gb.at(i) += beta * g.at(i);
    }
  };
  return id;
}

Tape::ValueId Tape::scale(ValueId a, double c) {
  check_exists(a);
  const Tensor& ta = nodes_[a].value;
  Tensor out(ta.rows(), ta.cols());
  for (size_t i = 0; i < out.size(); ++i) out.at(i) = c * ta.at(i);
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, a, id, c]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = nodes_[a].grad;
    for (size_t i = 0; i < g.size(); ++i) ga.at(i) += c * g.at(i);
  };
  return id;
}

Tape::ValueId Tape::row_logsumexp(ValueId s) {
  check_exists(s);
  const Tensor& ts = nodes_[s].value;
  const size_t n = ts.rows(), m = ts.cols();
  Tensor out(n, 1);
  auto softmax = std::make_shared<Tensor>(n, m);
  for (size_t i = 0; i < n; ++i) {
    const double* srow = ts.row(i);
    double mx = srow[0];
    for (size_t j = 1; j < m; ++j) mx = std::max(mx, srow[j]);
    double sum = 0.0;
    for (size_t j = 0; j < m; ++j) sum += std::exp(srow[j] - mx);
    const double lse = mx + std::log(sum);
    out(i, 0) = lse;
    double* prow = softmax->row(i);
    for (size_t j = 0; j < m; ++j) prow[j] = std::exp(srow[j] - lse);
  }
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, s, id, softmax, n, m]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& gs = nodes_[s].grad;
    for (size_t i = 0; i < n; ++i) {
      const double gi = g(i, 0);
      const double* prow = softmax->row(i);
      double* grow = gs.row(i);
      for (size_t j = 0; j < m; ++j) grow[j] += gi * prow[j];
    }
  };
  return id;
}

Tape::ValueId Tape::diag(ValueId s) {
  check_exists(s);
  const Tensor& ts = nodes_[s].value;
  if (ts.rows() != ts.cols())
    throw DimensionError("diag requires a square matrix, got " +
                         ts.shape_str());
  const size_t n = ts.rows();
  Tensor out(n, 1);
  for (size_t i = 0; i < n; ++i) out(i, 0) = ts(i, i);
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, s, id, n]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& gs = nodes_[s].grad;
    for (size_t i = 0; i < n; ++i) gs(i, i) += g(i, 0);
  };
  return id;
}

Tape::ValueId Tape::mean_all(ValueId x) {
  check_exists(x);
  const Tensor& tx = nodes_[x].value;
  if (tx.size() == 0) throw DimensionError("mean_all of empty tensor");
  double sum = 0.0;
  for (size_t i = 0; i < tx.size(); ++i) sum += tx.at(i);
  const double inv = 1.0 / static_cast<double>(tx.size());
  Tensor out(1, 1);
  out.at(0) = sum * inv;
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, x, id, inv]() {
    const double g = nodes_[id].grad.at(0) * inv;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < gx.size(); ++i) gx.at(i) += g;
  };
  return id;
}

Tape::ValueId Tape::sq_frobenius(ValueId x) {
  check_exists(x);
  const Tensor& tx = nodes_[x].value;
  double sum = 0.0;
  for (size_t i = 0; i < tx.size(); ++i) sum += tx.at(i) * tx.at(i);
  Tensor out(1, 1);
  out.at(0) = sum;
  ValueId id = push(std::move(out));
  nodes_[id].backprop = [this, x, id]() {
    const double g = nodes_[id].grad.at(0);
    const Tensor& in = nodes_[x].value;
    Tensor& gx = nodes_[x].grad;
    for (size_t i = 0; i < gx.size(); ++i) gx.at(i) += 2.0 * g * in.at(i);
  };
  return id;
}

Tape::ValueId Tape::bce_with_logits_mean(ValueId z, const Tensor& targets) {
  check_exists(z);
  const Tensor& tz = nodes_[z].value;
  if (!tz.same_shape(targets))
    throw DimensionError("bce_with_logits shape mismatch: " + tz.shape_str() +
                         " vs " + targets.shape_str());
  const size_t n = tz.size();
  if (n == 0) throw DimensionError("bce_with_logits of empty tensor");
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double zi = tz.at(i);
    // softplus(z) - y*z, stabilized
    const double sp = std::max(zi, 0.0) + std::log1p(std::exp(-std::abs(zi)));
    sum += sp - targets.at(i) * zi;
  }
  const double inv = 1.0 / static_cast<double>(n);
  Tensor out(1, 1);
  out.at(0) = sum * inv;
  ValueId id = push(std::move(out));
  auto y = std::make_shared<Tensor>(targets);
  nodes_[id].backprop = [this, z, id, y, inv]() {
    const double g = nodes_[id].grad.at(0) * inv;
    const Tensor& in = nodes_[z].value;
    Tensor& gz = nodes_[z].grad;
    for (size_t i = 0; i < gz.size(); ++i) {
      const double sig = 1.0 / (1.0 + std::exp(-in.at(i)));
      gz.at(i) += g * (sig - y->at(i));
    }
  };
  return id;
}

double Tape::scalar(ValueId id) const {
  check_exists(id);
  const Tensor& t = nodes_[id].value;
  if (t.rows() != 1 || t.cols() != 1)
    throw ContractError("expected scalar node, got " + t.shape_str());
  return t.at(0);
}

void Tape::backward(ValueId loss) {
  check_exists(loss);
  if (backward_done_)
    throw ContractError(
        "backward already called on this tape; re-record the forward pass "
        "first");
  const Tensor& lt = nodes_[loss].value;
  if (lt.rows() != 1 || lt.cols() != 1)
    throw ContractError("backward requires a scalar loss node, got " +
                        lt.shape_str());
  backward_done_ = true;

  for (Parameter* p : params_) {
    p->grad.fill(0.0);
    p->has_grad = true;
  }
  nodes_[loss].grad.at(0) = 1.0;
  for (ValueId id = static_cast<ValueId>(nodes_.size()) - 1; id >= 0; --id) {
    if (nodes_[id].backprop) nodes_[id].backprop();
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    accumulate(params_[i]->grad, nodes_[param_nodes_[i]].grad);
  }
}

}  // namespace jcce
