#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jcce/sparse.hpp"
#include "jcce/tape.hpp"

namespace jcce {

struct EncoderConfig {
  bool nonlinear = true;
  std::vector<size_t> hidden_dims = {250, 250};
  size_t embedding_dim = 50;
  double dropout = 0.2;
  void validate() const;
};

// One embedding tower. Layer weights are stored input-major (in_dim x
// out_dim) with forward h = x*W + b. Nonlinear towers run ReLU + dropout
// after every hidden layer and end with a linear projection; linear towers
// are a single affine map. Outputs are unnormalized; scoring applies cosine.
class Encoder {
 public:
  Encoder(size_t input_dim, EncoderConfig cfg);

  // Glorot uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases. Draw
  // order is row-major per layer, so a given rng state fixes every weight.
  void init_glorot(Rng& rng);

  // Records the forward pass on the tape; returns the (batch x E) node.
  Tape::ValueId forward(Tape& tape, const std::vector<SparseVec>& batch,
                        bool training, Rng& rng);

  // Inference forward without a tape (dropout off).
  Tensor embed(const std::vector<SparseVec>& batch) const;

  std::vector<Parameter*> parameters();
  size_t input_dim() const { return input_dim_; }
  size_t output_dim() const { return cfg_.embedding_dim; }
  const EncoderConfig& config() const { return cfg_; }
  size_t layer_count() const { return weights_.size(); }
  const Parameter& weight(size_t layer) const { return weights_[layer]; }
  const Parameter& bias(size_t layer) const { return biases_[layer]; }

  std::string to_json() const;
  static Encoder from_json(const std::string& text);

 private:
  std::vector<size_t> layer_dims() const;  // [input, hidden..., E]

  size_t input_dim_;
  EncoderConfig cfg_;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

}  // namespace jcce
