#include "jcce/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "jcce/rng.hpp"

namespace jcce {

Tensor EmbeddingTable::matrix() const {
  Tensor m(rows.size(), dim);
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < dim; ++c) m(r, c) = rows[r].embedding[c];
  return m;
}

EmbeddingTable export_embeddings(const JcceModel& model,
                                 const std::vector<ViewingEvent>& test_events,
                                 size_t sample_size, uint64_t seed) {
  if (sample_size > test_events.size())
    throw ConfigError("cannot sample more contexts than the test set holds");
  EmbeddingTable table;
  table.dim = model.embedding_dim();

  Rng rng(derive_seed(seed, "export:sample"));
  const auto picked = rng.sample_without_replacement(test_events.size(),
                                                     sample_size);
  for (size_t idx : picked) {
    const ViewingEvent& ev = test_events[idx];
    const SparseVec vec = model.features().encode_context(ev);
    const Tensor emb = model.embed_contexts({vec});
    EmbeddingRow row;
    row.kind = "context";
    row.id = "ctx" + std::to_string(idx);
    row.true_genre = ev.genre;
    row.rec_genre = model.recommend(vec, 1).front().genre;
    row.time_slot = ev.attr("time_slot");
    row.embedding.assign(emb.data(), emb.data() + emb.cols());
    table.rows.push_back(std::move(row));
  }
  const Tensor& catalog_emb = model.catalog_embeddings();
  for (size_t g = 0; g < model.catalog().size(); ++g) {
    EmbeddingRow row;
    row.kind = "content";
    row.id = model.catalog()[g];
    row.true_genre = model.catalog()[g];
    row.embedding.assign(catalog_emb.row(g), catalog_emb.row(g) + table.dim);
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_embedding_table(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open embedding file for writing: " + path);
  out << "kind,id,true_genre,rec_genre,time_slot";
  for (size_t c = 0; c < table.dim; ++c) out << ",e" << c;
  out << "\n";
  for (const auto& row : table.rows) {
    out << row.kind << "," << csv_escape(row.id) << ","
        << csv_escape(row.true_genre) << "," << csv_escape(row.rec_genre) << ","
        << csv_escape(row.time_slot);
    for (double v : row.embedding) out << "," << format_double(v);
    out << "\n";
  }
  if (!out) throw IoError("failed writing embedding file: " + path);
}

EmbeddingTable load_embedding_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding file is empty");
  const auto header = csv_split(line, 1);
  if (header.size() < 6 || header[0] != "kind" || header[1] != "id" ||
      header[2] != "true_genre" || header[3] != "rec_genre" ||
      header[4] != "time_slot")
    throw DataError("embedding file has an unexpected header");
  EmbeddingTable table;
  table.dim = header.size() - 5;
  for (size_t c = 0; c < table.dim; ++c)
    if (header[5 + c] != "e" + std::to_string(c))
      throw DataError("embedding file has an unexpected header column '" +
                      header[5 + c] + "'");
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv_split(line, line_no);
    if (fields.size() != 5 + table.dim)
      throw DataError("embedding file line " + std::to_string(line_no) +
                      " has " + std::to_string(fields.size()) + " fields");
    EmbeddingRow row;
    row.kind = fields[0];
    row.id = fields[1];
    row.true_genre = fields[2];
    row.rec_genre = fields[3];
    row.time_slot = fields[4];
    if (row.kind != "context" && row.kind != "content")
      throw DataError("embedding file line " + std::to_string(line_no) +
                      " has unknown kind '" + row.kind + "'");
    row.embedding.reserve(table.dim);
    for (size_t c = 0; c < table.dim; ++c) {
      const std::string& f = fields[5 + c];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size() || f.empty())
        throw DataError("embedding file line " + std::to_string(line_no) +
                        " has a non-numeric value '" + f + "'");
      row.embedding.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw DataError("embedding file has no rows");
  return table;
}

std::vector<std::string> nearest_neighbors(const std::vector<double>& query,
                                           const EmbeddingTable& table,
                                           size_t k) {
  if (k > table.rows.size())
    throw ConfigError("cannot return more neighbors than the table holds");
  double qnorm = 0.0;
  for (double v : query) qnorm += v * v;
  if (qnorm == 0.0) throw DataError("zero-norm query has no cosine neighbors");
  qnorm = std::sqrt(qnorm);

  std::vector<double> scores(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& emb = table.rows[r].embedding;
    if (emb.size() != query.size())
      throw DimensionError("query dim does not match the table");
    double dot = 0.0, norm = 0.0;
    for (size_t c = 0; c < emb.size(); ++c) {
      dot += emb[c] * query[c];
      norm += emb[c] * emb[c];
    }
    scores[r] = norm == 0.0 ? -2.0 : dot / (qnorm * std::sqrt(norm));
  }
  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return table.rows[a].id < table.rows[b].id;
  });
  std::vector<std::string> ids;
  ids.reserve(k);
  for (size_t i = 0; i < k; ++i) ids.push_back(table.rows[order[i]].id);
  return ids;
}

void save_projection_csv(const EmbeddingTable& table, const Tensor& coords,
                         const std::string& path) {
  if (coords.rows() != table.rows.size() || coords.cols() != 2)
    throw DimensionError("projection shape does not match the table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open projection file for writing: " + path);
  out << "kind,id,true_genre,rec_genre,time_slot,x,y\n";
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out << row.kind << "," << csv_escape(row.id) << ","
        << csv_escape(row.true_genre) << "," << csv_escape(row.rec_genre) << ","
        << csv_escape(row.time_slot) << "," << format_double(coords(r, 0))
        << "," << format_double(coords(r, 1)) << "\n";
  }
  if (!out) throw IoError("failed writing projection file: " + path);
}

}  // namespace jcce
