#include "jcce/encoder.hpp"

#include <cmath>
#include <utility>

#include "jcce/kernels.hpp"
#include "json.hpp"

namespace jcce {

void EncoderConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0))
    throw ConfigError("dropout must be in [0,1)");
  if (nonlinear && hidden_dims.empty())
    throw ConfigError("nonlinear encoder needs at least one hidden layer");
  for (size_t h : hidden_dims)
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
}

Encoder::Encoder(size_t input_dim, EncoderConfig cfg)
    : input_dim_(input_dim), cfg_(std::move(cfg)) {
  if (input_dim_ < 1) throw ConfigError("encoder input_dim must be positive");
  cfg_.validate();
  const auto dims = layer_dims();
  int id = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    weights_.emplace_back(Tensor(dims[l], dims[l + 1]), id++);
    biases_.emplace_back(Tensor(1, dims[l + 1]), id++);
  }
}

std::vector<size_t> Encoder::layer_dims() const {
  std::vector<size_t> dims{input_dim_};
  if (cfg_.nonlinear)
    dims.insert(dims.end(), cfg_.hidden_dims.begin(), cfg_.hidden_dims.end());
  dims.push_back(cfg_.embedding_dim);
  return dims;
}

void Encoder::init_glorot(Rng& rng) {
  for (auto& w : weights_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(w.value.rows() + w.value.cols()));
    for (size_t i = 0; i < w.value.size(); ++i)
      w.value.at(i) = rng.uniform(-limit, limit);
    w.grad.fill(0.0);
    w.has_grad = false;
  }
  for (auto& b : biases_) {
    b.value.fill(0.0);
    b.grad.fill(0.0);
    b.has_grad = false;
  }
}

Tape::ValueId Encoder::forward(Tape& tape, const std::vector<SparseVec>& batch,
                               bool training, Rng& rng) {
  for (const auto& v : batch)
    if (v.dim != input_dim_)
      throw DimensionError("sparse input dim mismatch for encoder");
  Tape::ValueId h = tape.sparse_linear(tape.param(weights_[0]),
                                       tape.param(biases_[0]), batch);
  const size_t layers = weights_.size();
  for (size_t l = 0; l + 1 < layers; ++l) {
    h = tape.relu(h);
    h = tape.dropout(h, cfg_.dropout, training, rng);
    h = tape.add_bias(tape.matmul(h, tape.param(weights_[l + 1])),
                      tape.param(biases_[l + 1]));
  }
  return h;
}

Tensor Encoder::embed(const std::vector<SparseVec>& batch) const {
  const size_t n = batch.size();
  Tensor h(n, weights_[0].value.cols());
  for (size_t r = 0; r < n; ++r) {
    if (batch[r].dim != input_dim_)
      throw DimensionError("sparse input dim mismatch for encoder");
    double* out = h.row(r);
    const Tensor& w = weights_[0].value;
    const Tensor& b = biases_[0].value;
    for (size_t c = 0; c < w.cols(); ++c) out[c] = b.at(c);
    for (size_t k = 0; k < batch[r].indices.size(); ++k) {
      const double v = batch[r].values[k];
      const double* wrow = w.row(batch[r].indices[k]);
      for (size_t c = 0; c < w.cols(); ++c) out[c] += v * wrow[c];
    }
  }
  for (size_t l = 1; l < weights_.size(); ++l) {
    kernels::relu(h.data(), h.data(), h.size());
    const Tensor& w = weights_[l].value;
    Tensor next(h.rows(), w.cols());
    kernels::mm_nn(h.data(), w.data(), next.data(), h.rows(), h.cols(),
                   w.cols());
    kernels::add_bias_rows(next.data(), biases_[l].value.data(), next.data(),
                           next.rows(), next.cols());
    h = std::move(next);
  }
  return h;
}

std::vector<Parameter*> Encoder::parameters() {
  std::vector<Parameter*> out;
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

namespace {

nlohmann::json tensor_to_json(const Tensor& t) {
  nlohmann::json j;
  j["rows"] = t.rows();
  j["cols"] = t.cols();
  std::vector<double> data(t.size());
  for (size_t i = 0; i < t.size(); ++i) data[i] = t.at(i);
  j["data"] = data;
  return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
  const size_t rows = j.at("rows").get<size_t>();
  const size_t cols = j.at("cols").get<size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols)
    throw ParseError("tensor data length does not match its shape");
  Tensor t(rows, cols);
  for (size_t i = 0; i < data.size(); ++i) t.at(i) = data[i];
  return t;
}

}  // namespace

std::string Encoder::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  j["nonlinear"] = cfg_.nonlinear;
  j["hidden_dims"] = cfg_.hidden_dims;
  j["embedding_dim"] = cfg_.embedding_dim;
  j["dropout"] = cfg_.dropout;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (const auto& w : weights_) j["weights"].push_back(tensor_to_json(w.value));
  for (const auto& b : biases_) j["biases"].push_back(tensor_to_json(b.value));
  return j.dump();
}

Encoder Encoder::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad encoder json: ") + e.what());
  }
  try {
    EncoderConfig cfg;
    cfg.nonlinear = j.at("nonlinear").get<bool>();
    cfg.hidden_dims = j.at("hidden_dims").get<std::vector<size_t>>();
    cfg.embedding_dim = j.at("embedding_dim").get<size_t>();
    cfg.dropout = j.at("dropout").get<double>();
    Encoder enc(j.at("input_dim").get<size_t>(), cfg);
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    if (jw.size() != enc.weights_.size() || jb.size() != enc.biases_.size())
      throw ParseError("encoder layer count does not match its config");
    for (size_t l = 0; l < enc.weights_.size(); ++l) {
      Tensor w = tensor_from_json(jw[l]);
      Tensor b = tensor_from_json(jb[l]);
      if (!w.same_shape(enc.weights_[l].value) ||
          !b.same_shape(enc.biases_[l].value))
        throw ParseError("encoder layer shape does not match its config");
      enc.weights_[l].value = std::move(w);
      enc.biases_[l].value = std::move(b);
    }
    return enc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad encoder json: ") + e.what());
  }
}

}  // namespace jcce
