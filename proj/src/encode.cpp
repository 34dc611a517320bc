#include "jcce/encode.hpp"

namespace jcce {

bool parse_binary_value(const std::string& value) {
  return value == "1" || value == "true";
}

FeatureEncoder::FeatureEncoder(const Schema& schema, const VocabSet& vocabs)
    : schema_(schema), vocabs_(vocabs) {
  schema_.validate();
  context_layout_ = make_layout(schema_, vocabs_, AttrSide::context);
  content_layout_ = make_layout(schema_, vocabs_, AttrSide::content);
  catalog_ = vocabs_.at("genre").values;
  fingerprint_ = schema_fingerprint(schema_, vocabs_);
}

void FeatureEncoder::encode_value(const SparseLayout::Block& block,
                                  const std::string& value,
                                  std::map<size_t, double>& entries) const {
  if (block.kind == AttrKind::binary) {
    if (parse_binary_value(value)) entries[block.offset] = 1.0;
    return;
  }
  const Vocabulary& vocab = vocabs_.at(block.attr);
  entries[block.offset + vocab.lookup(value)] = 1.0;
}

void FeatureEncoder::encode_attr(const SparseLayout::Block& block,
                                 const ViewingEvent& event,
                                 std::map<size_t, double>& entries) const {
  if (block.attr == "household_id") {
    encode_value(block, event.household_id, entries);
  } else if (block.attr == "viewer_ids") {
    for (const auto& v : event.viewer_ids) encode_value(block, v, entries);
  } else if (block.attr == "genre") {
    encode_value(block, event.genre, entries);
  } else if (block.attr == "top_genre") {
    encode_value(block, event.top_genre, entries);
  } else {
    auto it = event.attrs.find(block.attr);
    if (it == event.attrs.end())
      throw DataError("event is missing attribute '" + block.attr + "'");
    encode_value(block, it->second, entries);
  }
}

static SparseVec to_sparse(const std::map<size_t, double>& entries,
                           size_t dim) {
  SparseVec v;
  v.dim = dim;
  for (const auto& [idx, val] : entries) v.push(idx, val);
  return v;
}

SparseVec FeatureEncoder::encode_context(const ViewingEvent& event) const {
  std::map<size_t, double> entries;
  for (const auto& block : context_layout_.blocks)
    encode_attr(block, event, entries);
  return to_sparse(entries, context_layout_.dim);
}

SparseVec FeatureEncoder::encode_content(const ViewingEvent& event) const {
  std::map<size_t, double> entries;
  for (const auto& block : content_layout_.blocks)
    encode_attr(block, event, entries);
  return to_sparse(entries, content_layout_.dim);
}

SparseVec FeatureEncoder::encode_genre(const std::string& genre) const {
  ViewingEvent ev;
  ev.genre = genre;
  auto it = vocabs_.genre_to_top.find(genre);
  ev.top_genre = it == vocabs_.genre_to_top.end() ? "" : it->second;
  std::map<size_t, double> entries;
  for (const auto& block : content_layout_.blocks)
    encode_attr(block, ev, entries);
  return to_sparse(entries, content_layout_.dim);
}

SparseVec FeatureEncoder::encode_context_query(
    const std::map<std::string, std::string>& attr_values) const {
  for (const auto& [name, value] : attr_values) {
    (void)value;
    const AttributeDef* def = schema_.find(name);
    if (!def || def->side != AttrSide::context)
      throw ConfigError("unknown context attribute: " + name);
  }
  std::map<size_t, double> entries;
  for (const auto& block : context_layout_.blocks) {
    auto it = attr_values.find(block.attr);
    if (it == attr_values.end()) continue;
    if (block.kind == AttrKind::multi_categorical) {
      std::string cur;
      std::vector<std::string> parts;
      for (char c : it->second) {
        if (c == '|') {
          if (!cur.empty()) parts.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!cur.empty()) parts.push_back(cur);
      for (const auto& p : parts) encode_value(block, p, entries);
    } else {
      encode_value(block, it->second, entries);
    }
  }
  return to_sparse(entries, context_layout_.dim);
}

}  // namespace jcce
