#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/model.hpp"
#include "jcce/tensor.hpp"

namespace jcce {

// One exported embedding: a sampled context (labeled with its event's genre,
// the model's top recommendation and the time slot) or a catalog content.
struct EmbeddingRow {
  std::string kind;  // "context" or "content"
  std::string id;
  std::string true_genre;
  std::string rec_genre;   // context rows only
  std::string time_slot;   // context rows only
  std::vector<double> embedding;
};

struct EmbeddingTable {
  size_t dim = 0;
  std::vector<EmbeddingRow> rows;
  Tensor matrix() const;  // rows x dim
};

// Samples sample_size test contexts without replacement, embeds them with the
// context tower, labels each with its true genre / top-1 recommendation /
// time slot, then appends every catalog genre embedded with the content tower.
EmbeddingTable export_embeddings(const JcceModel& model,
                                 const std::vector<ViewingEvent>& test_events,
                                 size_t sample_size, uint64_t seed);

// CSV with header kind,id,true_genre,rec_genre,time_slot,e0..e{E-1}; floats
// carry enough digits to round-trip bit-exactly.
void save_embedding_table(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embedding_table(const std::string& path);

// Row ids by descending cosine similarity to the query, ties by ascending id.
std::vector<std::string> nearest_neighbors(const std::vector<double>& query,
                                           const EmbeddingTable& table,
                                           size_t k);

// CSV with header kind,id,true_genre,rec_genre,time_slot,x,y pairing table
// rows with their projected coordinates.
void save_projection_csv(const EmbeddingTable& table, const Tensor& coords,
                         const std::string& path);

}  // namespace jcce
