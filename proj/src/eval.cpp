#include "jcce/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace jcce {

double hit_ratio(const std::vector<size_t>& ranks, int k) {
  if (ranks.empty()) throw DataError("hit ratio over zero queries");
  if (k < 1) throw ConfigError("hit-ratio cutoff must be positive");
  size_t hits = 0;
  for (size_t r : ranks)
    if (r <= static_cast<size_t>(k)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mean_reciprocal_rank(const std::vector<size_t>& ranks) {
  if (ranks.empty()) throw DataError("mean reciprocal rank over zero queries");
  double sum = 0.0;
  for (size_t r : ranks) sum += 1.0 / static_cast<double>(r);
  return sum / static_cast<double>(ranks.size());
}

std::vector<char> hits_at(const std::vector<size_t>& ranks, int k) {
  if (k < 1) throw ConfigError("hit cutoff must be positive");
  std::vector<char> out(ranks.size());
  for (size_t i = 0; i < ranks.size(); ++i)
    out[i] = ranks[i] <= static_cast<size_t>(k) ? 1 : 0;
  return out;
}

EvalReport evaluate(const Ranker& ranker,
                    const std::vector<ViewingEvent>& test_events,
                    const std::vector<int>& ks) {
  if (test_events.empty()) throw DataError("no test events to evaluate");
  EvalReport report;
  report.method = ranker.name();
  report.n_queries = test_events.size();
  report.catalog_size = ranker.catalog().size();
  report.ranks.resize(test_events.size());

  const int64_t n = static_cast<int64_t>(test_events.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i)
    report.ranks[i] = ranker.rank_of(test_events[i], static_cast<size_t>(i),
                                     test_events[i].genre);

  for (size_t r : report.ranks)
    if (r > report.catalog_size) ++report.missing_targets;
  for (int k : ks) report.hr[k] = hit_ratio(report.ranks, k);
  report.mrr = mean_reciprocal_rank(report.ranks);
  return report;
}

namespace {

// Upper tail of the chi-squared distribution with one degree of freedom.
double chi2_sf_1dof(double x) { return std::erfc(std::sqrt(x / 2.0)); }

// P(X <= k) doubled, X ~ Binomial(n, 1/2), capped at 1.
double exact_two_sided(size_t k, size_t n) {
  double coeff = 1.0;  // C(n, 0)
  double sum = 1.0;
  for (size_t i = 1; i <= k; ++i) {
    coeff *= static_cast<double>(n - i + 1) / static_cast<double>(i);
    sum += coeff;
  }
  const double p = 2.0 * sum * std::pow(0.5, static_cast<double>(n));
  return p > 1.0 ? 1.0 : p;
}

}  // namespace

McNemarResult mcnemar(const std::vector<char>& hits_a,
                      const std::vector<char>& hits_b) {
  if (hits_a.size() != hits_b.size())
    throw DataError("paired test needs equally long hit vectors");
  McNemarResult r;
  for (size_t i = 0; i < hits_a.size(); ++i) {
    if (hits_a[i] && !hits_b[i]) ++r.b;
    if (!hits_a[i] && hits_b[i]) ++r.c;
  }
  const size_t n = r.b + r.c;
  if (n == 0) {
    r.exact = true;
    r.p_value = 1.0;
    return r;
  }
  if (n >= 25) {
    const double diff =
        std::fabs(static_cast<double>(r.b) - static_cast<double>(r.c));
    r.statistic = (diff - 1.0) * (diff - 1.0) / static_cast<double>(n);
    r.p_value = chi2_sf_1dof(r.statistic);
  } else {
    r.exact = true;
    r.p_value = exact_two_sided(std::min(r.b, r.c), n);
  }
  return r;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report file for writing: " + path);
  return out;
}

}  // namespace

void write_metrics_csv(const std::string& path,
                       const std::vector<EvalReport>& reports) {
  auto out = open_csv(path);
  out << "method,metric,k,value\n";
  char buf[64];
  for (const auto& rep : reports) {
    for (const auto& [k, v] : rep.hr) {
      snprintf(buf, sizeof(buf), "%.6f", v);
      out << rep.method << ",hr," << k << "," << buf << "\n";
    }
    snprintf(buf, sizeof(buf), "%.6f", rep.mrr);
    out << rep.method << ",mrr,," << buf << "\n";
  }
  if (!out) throw IoError("failed writing report file: " + path);
}

void write_hit_curve_csv(const std::string& path,
                         const std::vector<EvalReport>& reports) {
  auto out = open_csv(path);
  out << "method,k,hit_ratio\n";
  char buf[64];
  for (const auto& rep : reports) {
    for (size_t k = 1; k <= rep.catalog_size; ++k) {
      snprintf(buf, sizeof(buf), "%.6f",
               hit_ratio(rep.ranks, static_cast<int>(k)));
      out << rep.method << "," << k << "," << buf << "\n";
    }
  }
  if (!out) throw IoError("failed writing report file: " + path);
}

void write_mcnemar_csv(const std::string& path,
                       const std::vector<EvalReport>& reports) {
  auto out = open_csv(path);
  out << "method_a,method_b,k,b,c,test,statistic,p_value\n";
  char buf[64];
  for (size_t a = 0; a < reports.size(); ++a) {
    for (size_t b = a + 1; b < reports.size(); ++b) {
      const auto res =
          mcnemar(hits_at(reports[a].ranks, 1), hits_at(reports[b].ranks, 1));
      out << reports[a].method << "," << reports[b].method << ",1," << res.b
          << "," << res.c << "," << (res.exact ? "exact" : "chi2") << ",";
      if (!res.exact) {
        snprintf(buf, sizeof(buf), "%.6f", res.statistic);
        out << buf;
      }
      snprintf(buf, sizeof(buf), "%.9f", res.p_value);
      out << "," << buf << "\n";
    }
  }
  if (!out) throw IoError("failed writing report file: " + path);
}

}  // namespace jcce
