#pragma once

#include <cstdint>
#include <vector>

#include "jcce/tape.hpp"

namespace jcce {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Moments are owned here,
// aligned with the parameter order given at construction.
class AdamState {
 public:
  AdamState(std::vector<Parameter*> params, AdamConfig cfg);

  // In-place update from Parameter::grad; requires a backward pass since the
  // last step. Consumes has_grad so a stale gradient cannot be reused.
  void step();

  int64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  AdamConfig cfg_;
  int64_t t_ = 0;
};

}  // namespace jcce
