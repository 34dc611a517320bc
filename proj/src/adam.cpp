#include "jcce/adam.hpp"

#include <cmath>

namespace jcce {

AdamState::AdamState(std::vector<Parameter*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (Parameter* p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void AdamState::step() {
  for (Parameter* p : params_)
    if (!p->has_grad)
      throw ContractError("adam step without gradients for parameter " +
                          std::to_string(p->id));
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter* p = params_[i];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (size_t j = 0; j < p->value.size(); ++j) {
      const double g = p->grad.at(j);
      m.at(j) = cfg_.beta1 * m.at(j) + (1.0 - cfg_.beta1) * g;
      v.at(j) = cfg_.beta2 * v.at(j) + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m.at(j) / bc1;
      const double vhat = v.at(j) / bc2;
      p->value.at(j) -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
    p->has_grad = false;
  }
}

}  // namespace jcce
