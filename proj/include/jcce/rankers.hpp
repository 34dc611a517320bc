#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/model.hpp"
#include "jcce/rng.hpp"

namespace jcce {

// Shared "fit on train, rank for a context" interface. rank() returns a
// permutation of catalog indices, best first; it is const and thread-safe so
// evaluation can fan out over queries. query_index feeds the per-query rng of
// randomized rankers, keeping parallel evaluation deterministic.
class Ranker {
 public:
  explicit Ranker(std::vector<std::string> catalog);
  virtual ~Ranker() = default;

  virtual const std::string& name() const = 0;
  virtual void fit(const std::vector<ViewingEvent>& train);
  virtual std::vector<size_t> rank(const ViewingEvent& query,
                                   size_t query_index) const = 0;

  const std::vector<std::string>& catalog() const { return catalog_; }
  // 1-based rank of a genre for this query; catalog_size + 1 when the genre
  // is outside the catalog.
  size_t rank_of(const ViewingEvent& query, size_t query_index,
                 const std::string& genre) const;

 protected:
  void require_fitted() const;
  // Catalog index of a genre, or catalog size when unknown.
  size_t index_of(const std::string& genre) const;

  std::vector<std::string> catalog_;
  std::map<std::string, size_t> index_;
  bool fitted_ = false;
};

// Uniform random permutation per query, derived from (seed, query_index).
class RandomRanker : public Ranker {
 public:
  RandomRanker(std::vector<std::string> catalog, uint64_t seed);
  const std::string& name() const override;
  std::vector<size_t> rank(const ViewingEvent& query,
                           size_t query_index) const override;

 private:
  uint64_t seed_;
};

// Descending training count, ties by ascending catalog index; one global
// ranking for every query.
class ToppopRanker : public Ranker {
 public:
  explicit ToppopRanker(std::vector<std::string> catalog);
  const std::string& name() const override;
  void fit(const std::vector<ViewingEvent>& train) override;
  std::vector<size_t> rank(const ViewingEvent& query,
                           size_t query_index) const override;
  const std::vector<int64_t>& counts() const { return counts_; }

 protected:
  std::vector<size_t> order_by_count(const std::vector<int64_t>& counts) const;
  std::vector<int64_t> counts_;
  std::vector<size_t> global_order_;
};

// Counts conditioned on the (day_of_week, time_slot) cell of the query;
// cells unseen in training fall back to the global popularity ranking.
class ToppopTemporalRanker : public ToppopRanker {
 public:
  explicit ToppopTemporalRanker(std::vector<std::string> catalog);
  const std::string& name() const override;
  void fit(const std::vector<ViewingEvent>& train) override;
  std::vector<size_t> rank(const ViewingEvent& query,
                           size_t query_index) const override;

 private:
  std::map<std::string, std::vector<size_t>> cell_order_;
};

// Trained two-tower model behind the shared interface.
class JcceRanker : public Ranker {
 public:
  JcceRanker(const JcceModel& model, std::string name);
  const std::string& name() const override;
  std::vector<size_t> rank(const ViewingEvent& query,
                           size_t query_index) const override;

 private:
  const JcceModel& model_;
  std::string name_;
};

// Ranks catalog indices by descending score with ascending-index tie-break.
std::vector<size_t> order_descending(const std::vector<double>& scores);

}  // namespace jcce
