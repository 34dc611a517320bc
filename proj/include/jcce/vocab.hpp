#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/schema.hpp"

namespace jcce {

// Dense value->index map for one categorical attribute. Indices follow the
// lexicographic order of the observed values; index `cardinality()` is the
// reserved OOV slot.
struct Vocabulary {
  std::vector<std::string> values;          // index -> value, sorted
  std::map<std::string, size_t> to_index;   // value -> index
  std::vector<int64_t> counts;              // observations per value

  size_t cardinality() const { return values.size(); }
  size_t oov_index() const { return values.size(); }
  // Index within the attribute block (OOV for unseen values).
  size_t lookup(const std::string& value) const {
    auto it = to_index.find(value);
    return it == to_index.end() ? oov_index() : it->second;
  }
};

// All vocabularies of a schema plus the derived sparse layouts.
struct VocabSet {
  std::map<std::string, Vocabulary> by_attr;
  std::map<std::string, std::string> genre_to_top;

  const Vocabulary& at(const std::string& attr) const;

  std::string to_json() const;
  static VocabSet from_json(const std::string& text);
  static VocabSet load(const std::string& path);
  void save(const std::string& path) const;
};

// Block layout of one side's sparse encoding: attributes in schema order,
// categorical blocks sized cardinality+1 (OOV last), binary blocks sized 1.
struct SparseLayout {
  struct Block {
    std::string attr;
    AttrKind kind;
    size_t offset;
    size_t width;
  };
  std::vector<Block> blocks;
  size_t dim = 0;

  const Block& block(const std::string& attr) const;
};

SparseLayout make_layout(const Schema& schema, const VocabSet& vocabs,
                         AttrSide side);

// Scans training events and indexes every observed categorical value.
// Deterministic: indices are assigned in lexicographic value order. Also
// collects the genre -> top_genre map and rejects genres claiming two
// different top-level genres.
VocabSet build_vocabularies(const std::vector<ViewingEvent>& events,
                            const Schema& schema);

// Stable 64-bit digest over schema + vocab contents, hex-encoded.
std::string schema_fingerprint(const Schema& schema, const VocabSet& vocabs);

}  // namespace jcce
