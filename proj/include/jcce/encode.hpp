#pragma once

#include <map>
#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/sparse.hpp"
#include "jcce/vocab.hpp"

namespace jcce {

// Turns events into the sparse one/multi-hot vectors consumed by the
// encoders. Layouts are fixed by (schema, vocabs); unseen categorical values
// land on the per-attribute OOV index.
class FeatureEncoder {
 public:
  FeatureEncoder(const Schema& schema, const VocabSet& vocabs);

  size_t context_dim() const { return context_layout_.dim; }
  size_t content_dim() const { return content_layout_.dim; }

  SparseVec encode_context(const ViewingEvent& event) const;
  SparseVec encode_content(const ViewingEvent& event) const;
  // Content vector for one catalog genre (top genre via the vocab map).
  SparseVec encode_genre(const std::string& genre) const;

  // Ad-hoc context from attribute name -> value pairs (CLI / serving).
  // Unknown attribute names are an error; attributes left unspecified encode
  // as empty blocks; unseen values go to OOV like everywhere else.
  SparseVec encode_context_query(
      const std::map<std::string, std::string>& attr_values) const;

  // Catalog of encodable contents: the training genre vocabulary, in index
  // order.
  const std::vector<std::string>& catalog() const { return catalog_; }

  const Schema& schema() const { return schema_; }
  const VocabSet& vocabs() const { return vocabs_; }
  const SparseLayout& context_layout() const { return context_layout_; }
  const SparseLayout& content_layout() const { return content_layout_; }
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  void encode_attr(const SparseLayout::Block& block, const ViewingEvent& event,
                   std::map<size_t, double>& entries) const;
  void encode_value(const SparseLayout::Block& block, const std::string& value,
                    std::map<size_t, double>& entries) const;

  Schema schema_;
  VocabSet vocabs_;
  SparseLayout context_layout_;
  SparseLayout content_layout_;
  std::vector<std::string> catalog_;
  std::string fingerprint_;
};

bool parse_binary_value(const std::string& value);

}  // namespace jcce
