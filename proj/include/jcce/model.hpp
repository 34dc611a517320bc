#pragma once

#include <string>
#include <vector>

#include "jcce/encode.hpp"
#include "jcce/encoder.hpp"
#include "jcce/schema.hpp"
#include "jcce/tensor.hpp"
#include "jcce/vocab.hpp"

namespace jcce {

inline constexpr const char* kModelVersion = "jcce-model-v1";

struct ScoredContent {
  std::string genre;
  double score;
};

// Trained pair of towers plus everything needed to score: schema, vocabularies
// and the derived feature layouts. Content embeddings for the whole catalog
// are precomputed at construction; scores are cosine similarities, and ties
// break toward the lower catalog index so rankings are total and stable.
class JcceModel {
 public:
  JcceModel(Schema schema, VocabSet vocabs, Encoder context_encoder,
            Encoder content_encoder);

  const Schema& schema() const { return features_.schema(); }
  const VocabSet& vocabs() const { return features_.vocabs(); }
  const FeatureEncoder& features() const { return features_; }
  const std::string& fingerprint() const { return features_.fingerprint(); }
  const std::vector<std::string>& catalog() const { return features_.catalog(); }
  Encoder& context_encoder() { return context_encoder_; }
  Encoder& content_encoder() { return content_encoder_; }
  const Encoder& context_encoder() const { return context_encoder_; }
  const Encoder& content_encoder() const { return content_encoder_; }
  size_t embedding_dim() const { return context_encoder_.output_dim(); }

  // Recomputes the cached catalog embeddings; call after changing weights.
  void refresh_catalog();
  const Tensor& catalog_embeddings() const { return catalog_embeddings_; }

  Tensor embed_contexts(const std::vector<SparseVec>& batch) const;

  // Cosine score against each catalog entry, in catalog order.
  std::vector<double> score_catalog(const SparseVec& context) const;
  // Cosine score for one catalog genre.
  double score(const SparseVec& context, const std::string& genre) const;
  std::vector<ScoredContent> recommend(const SparseVec& context, size_t k) const;
  // 1-based rank of a genre under the model's ordering for this context;
  // a genre outside the catalog ranks catalog_size + 1.
  size_t rank_of(const SparseVec& context, const std::string& genre) const;

  std::string to_json() const;
  static JcceModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static JcceModel load(const std::string& path);

 private:
  FeatureEncoder features_;
  Encoder context_encoder_;
  Encoder content_encoder_;
  Tensor catalog_embeddings_;
  std::vector<double> catalog_norms_;
};

}  // namespace jcce
