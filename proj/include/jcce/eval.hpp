#pragma once

#include <map>
#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/rankers.hpp"

namespace jcce {

struct EvalReport {
  std::string method;
  size_t n_queries = 0;
  size_t catalog_size = 0;
  size_t missing_targets = 0;   // targets outside the catalog
  std::vector<size_t> ranks;    // 1-based rank of each query's true genre
  std::map<int, double> hr;     // K -> hit ratio at the configured Ks
  double mrr = 0.0;
};

// Share of ranks ≤ k.
double hit_ratio(const std::vector<size_t>& ranks, int k);
// Mean of 1/rank.
double mean_reciprocal_rank(const std::vector<size_t>& ranks);
// Per-query hit indicator at k.
std::vector<char> hits_at(const std::vector<size_t>& ranks, int k);

// Ranks every test event's true genre with the given ranker. Queries fan out
// across threads; per-query results land by index, so aggregation order is
// fixed and the report is identical at any thread count. Targets outside the
// catalog score rank catalog_size + 1 and are counted in missing_targets.
EvalReport evaluate(const Ranker& ranker,
                    const std::vector<ViewingEvent>& test_events,
                    const std::vector<int>& ks);

struct McNemarResult {
  size_t b = 0;  // first hits, second misses
  size_t c = 0;  // first misses, second hits
  bool exact = false;
  double statistic = 0.0;  // continuity-corrected chi-squared (chi2 path only)
  double p_value = 1.0;
};

// Paired comparison of two hit vectors from the same queries: exact
// two-sided binomial when b + c < 25, else continuity-corrected chi-squared
// with one degree of freedom.
McNemarResult mcnemar(const std::vector<char>& hits_a,
                      const std::vector<char>& hits_b);

// method,metric,k,value rows: one hr row per configured K plus one mrr row.
void write_metrics_csv(const std::string& path,
                       const std::vector<EvalReport>& reports);
// method,k,hit_ratio rows for every K from 1 to the catalog size.
void write_hit_curve_csv(const std::string& path,
                         const std::vector<EvalReport>& reports);
// Pairwise McNemar on hit@1 over all report pairs.
void write_mcnemar_csv(const std::string& path,
                       const std::vector<EvalReport>& reports);

}  // namespace jcce
