#include "jcce/rankers.hpp"

#include <algorithm>

namespace jcce {

std::vector<size_t> order_descending(const std::vector<double>& scores) {
  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

Ranker::Ranker(std::vector<std::string> catalog)
    : catalog_(std::move(catalog)) {
  if (catalog_.empty()) throw DataError("ranker catalog is empty");
  for (size_t i = 0; i < catalog_.size(); ++i) index_[catalog_[i]] = i;
  if (index_.size() != catalog_.size())
    throw DataError("ranker catalog has duplicate entries");
}

void Ranker::fit(const std::vector<ViewingEvent>&) { fitted_ = true; }

void Ranker::require_fitted() const {
  if (!fitted_) throw ContractError("rank() called before fit()");
}

size_t Ranker::index_of(const std::string& genre) const {
  auto it = index_.find(genre);
  return it == index_.end() ? catalog_.size() : it->second;
}

size_t Ranker::rank_of(const ViewingEvent& query, size_t query_index,
                       const std::string& genre) const {
  const size_t target = index_of(genre);
  if (target >= catalog_.size()) return catalog_.size() + 1;
  const auto order = rank(query, query_index);
  for (size_t pos = 0; pos < order.size(); ++pos)
    if (order[pos] == target) return pos + 1;
  throw ContractError("ranking is not a permutation of the catalog");
}

RandomRanker::RandomRanker(std::vector<std::string> catalog, uint64_t seed)
    : Ranker(std::move(catalog)), seed_(seed) {
  fitted_ = true;  // nothing to fit
}

const std::string& RandomRanker::name() const {
  static const std::string n = "random";
  return n;
}

std::vector<size_t> RandomRanker::rank(const ViewingEvent&,
                                       size_t query_index) const {
  Rng rng(derive_seed(seed_, "random-rank:" + std::to_string(query_index)));
  std::vector<size_t> order(catalog_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (size_t i = order.size() - 1; i > 0; --i) {
    const size_t j = rng.uniform_int(i + 1);
    std::swap(order[i], order[j]);
  }
  return order;
}

ToppopRanker::ToppopRanker(std::vector<std::string> catalog)
    : Ranker(std::move(catalog)) {}

const std::string& ToppopRanker::name() const {
  static const std::string n = "toppop";
  return n;
}

std::vector<size_t> ToppopRanker::order_by_count(
    const std::vector<int64_t>& counts) const {
  std::vector<size_t> order(counts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  return order;
}

void ToppopRanker::fit(const std::vector<ViewingEvent>& train) {
  counts_.assign(catalog_.size(), 0);
  for (const auto& ev : train) {
    const size_t idx = index_of(ev.genre);
    if (idx < counts_.size()) ++counts_[idx];
  }
  global_order_ = order_by_count(counts_);
  fitted_ = true;
}

std::vector<size_t> ToppopRanker::rank(const ViewingEvent&, size_t) const {
  require_fitted();
  return global_order_;
}

ToppopTemporalRanker::ToppopTemporalRanker(std::vector<std::string> catalog)
    : ToppopRanker(std::move(catalog)) {}

const std::string& ToppopTemporalRanker::name() const {
  static const std::string n = "toppop-temporal";
  return n;
}

namespace {

std::string temporal_cell(const ViewingEvent& ev) {
  return ev.attr("day_of_week") + "|" + ev.attr("time_slot");
}

}  // namespace

void ToppopTemporalRanker::fit(const std::vector<ViewingEvent>& train) {
  ToppopRanker::fit(train);
  std::map<std::string, std::vector<int64_t>> cell_counts;
  for (const auto& ev : train) {
    const size_t idx = index_of(ev.genre);
    if (idx >= catalog_.size()) continue;
    auto& counts = cell_counts[temporal_cell(ev)];
    counts.resize(catalog_.size(), 0);
    ++counts[idx];
  }
  cell_order_.clear();
  for (const auto& [cell, counts] : cell_counts)
    cell_order_[cell] = order_by_count(counts);
}

std::vector<size_t> ToppopTemporalRanker::rank(const ViewingEvent& query,
                                               size_t) const {
  require_fitted();
  auto it = cell_order_.find(temporal_cell(query));
  return it == cell_order_.end() ? global_order_ : it->second;
}

JcceRanker::JcceRanker(const JcceModel& model, std::string name)
    : Ranker(model.catalog()), model_(model), name_(std::move(name)) {
  fitted_ = true;  // the wrapped model arrives trained
}

const std::string& JcceRanker::name() const { return name_; }

std::vector<size_t> JcceRanker::rank(const ViewingEvent& query, size_t) const {
  return order_descending(
      model_.score_catalog(model_.features().encode_context(query)));
}

}  // namespace jcce
