#include "jcce/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace jcce {

JcceModel::JcceModel(Schema schema, VocabSet vocabs, Encoder context_encoder,
                     Encoder content_encoder)
    : features_(schema, vocabs),
      context_encoder_(std::move(context_encoder)),
      content_encoder_(std::move(content_encoder)) {
  if (context_encoder_.input_dim() != features_.context_dim())
    throw ConfigError("context encoder input dim does not match the layout");
  if (content_encoder_.input_dim() != features_.content_dim())
    throw ConfigError("content encoder input dim does not match the layout");
  if (context_encoder_.output_dim() != content_encoder_.output_dim())
    throw ConfigError("towers must share one embedding dim");
  refresh_catalog();
}

void JcceModel::refresh_catalog() {
  std::vector<SparseVec> batch;
  batch.reserve(catalog().size());
  for (const auto& genre : catalog())
    batch.push_back(features_.encode_genre(genre));
  catalog_embeddings_ = content_encoder_.embed(batch);
  catalog_norms_.resize(catalog_embeddings_.rows());
  for (size_t g = 0; g < catalog_embeddings_.rows(); ++g) {
    double s = 0.0;
    const double* row = catalog_embeddings_.row(g);
    for (size_t k = 0; k < catalog_embeddings_.cols(); ++k) s += row[k] * row[k];
    catalog_norms_[g] = std::sqrt(s);
  }
}

Tensor JcceModel::embed_contexts(const std::vector<SparseVec>& batch) const {
  return context_encoder_.embed(batch);
}

std::vector<double> JcceModel::score_catalog(const SparseVec& context) const {
  const Tensor c = context_encoder_.embed({context});
  double cnorm = 0.0;
  for (size_t k = 0; k < c.cols(); ++k) cnorm += c.at(k) * c.at(k);
  cnorm = std::sqrt(cnorm);
  // A zero-norm embedding makes cosine undefined; treat it as the degenerate
  // model state it is rather than inventing a score.
  if (cnorm == 0.0) throw DataError("context embeds to the zero vector");
  std::vector<double> scores(catalog().size(), 0.0);
  for (size_t g = 0; g < scores.size(); ++g) {
    if (catalog_norms_[g] == 0.0)
      throw DataError("content '" + catalog()[g] + "' embeds to the zero vector");
    double dot = 0.0;
    const double* row = catalog_embeddings_.row(g);
    for (size_t k = 0; k < c.cols(); ++k) dot += c.at(k) * row[k];
    scores[g] = dot / (cnorm * catalog_norms_[g]);
  }
  return scores;
}

double JcceModel::score(const SparseVec& context,
                        const std::string& genre) const {
  const size_t idx = vocabs().at("genre").lookup(genre);
  if (idx >= catalog().size())
    throw DataError("genre '" + genre + "' is not in the catalog");
  return score_catalog(context)[idx];
}

std::vector<ScoredContent> JcceModel::recommend(const SparseVec& context,
                                                size_t k) const {
  if (k < 1) throw ConfigError("recommendation count must be positive");
  const auto scores = score_catalog(context);
  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  const size_t take = std::min(k, order.size());
  std::vector<ScoredContent> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i)
    out.push_back({catalog()[order[i]], scores[order[i]]});
  return out;
}

size_t JcceModel::rank_of(const SparseVec& context,
                          const std::string& genre) const {
  const auto& vocab = vocabs().at("genre");
  const size_t target = vocab.lookup(genre);
  if (target >= catalog().size()) return catalog().size() + 1;
  const auto scores = score_catalog(context);
  size_t rank = 1;
  for (size_t g = 0; g < scores.size(); ++g) {
    if (scores[g] > scores[target]) ++rank;
    else if (scores[g] == scores[target] && g < target) ++rank;
  }
  return rank;
}

std::string JcceModel::to_json() const {
  nlohmann::json j;
  j["version"] = kModelVersion;
  j["schema_fingerprint"] = fingerprint();
  j["embedding_dim"] = embedding_dim();
  j["schema"] = nlohmann::json::parse(schema().to_json());
  j["vocabs"] = nlohmann::json::parse(vocabs().to_json());
  j["context_encoder"] = nlohmann::json::parse(context_encoder_.to_json());
  j["content_encoder"] = nlohmann::json::parse(content_encoder_.to_json());
  return j.dump(2) + "\n";
}

JcceModel JcceModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j["version"].is_string())
    throw ParseError("model json has no version tag");
  const std::string version = j["version"].get<std::string>();
  if (version != kModelVersion)
    throw VersionError("unsupported model version: " + version);
  try {
    Schema schema = Schema::from_json(j.at("schema").dump());
    VocabSet vocabs = VocabSet::from_json(j.at("vocabs").dump());
    Encoder ctx = Encoder::from_json(j.at("context_encoder").dump());
    Encoder cnt = Encoder::from_json(j.at("content_encoder").dump());
    const std::string stored = j.at("schema_fingerprint").get<std::string>();
    const std::string actual = schema_fingerprint(schema, vocabs);
    if (stored != actual)
      throw FingerprintError("model fingerprint " + stored +
                             " does not match its schema/vocabs (" + actual +
                             ")");
    try {
      return JcceModel(std::move(schema), std::move(vocabs), std::move(ctx),
                       std::move(cnt));
    } catch (const ConfigError& e) {
      throw ParseError(std::string("inconsistent model file: ") + e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model json: ") + e.what());
  }
}

void JcceModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << to_json();
  if (!out) throw IoError("failed writing model file: " + path);
}

JcceModel JcceModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace jcce
