#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "jcce/datagen.hpp"
#include "jcce/eval.hpp"
#include "jcce/filters.hpp"
#include "jcce/rng.hpp"

using namespace jcce;

namespace {

// Deterministic ranker whose permutation is fixed at construction, so every
// metric downstream of it has a hand-computable value.
class FixedRanker : public Ranker {
 public:
  FixedRanker(std::vector<std::string> catalog, std::vector<size_t> order)
      : Ranker(std::move(catalog)), order_(std::move(order)) {
    fitted_ = true;
  }
  const std::string& name() const override {
    static const std::string n = "fixed";
    return n;
  }
  std::vector<size_t> rank(const ViewingEvent&, size_t) const override {
    return order_;
  }

 private:
  std::vector<size_t> order_;
};

ViewingEvent event_with_genre(const std::string& genre) {
  ViewingEvent ev;
  ev.timestamp = 0;
  ev.household_id = "h0";
  ev.viewer_ids = {"h0_a0"};
  ev.duration_minutes = 10;
  ev.genre = genre;
  ev.top_genre = "t00";
  ev.attrs = {{"day_of_week", "Mon"}, {"time_slot", "20:00"}};
  return ev;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("hit ratio, mrr and hit indicators on hand data") {
  const std::vector<size_t> ranks = {1, 3, 2, 5, 1, 4};
  CHECK(hit_ratio(ranks, 1) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(hit_ratio(ranks, 3) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(hit_ratio(ranks, 5) == 1.0);
  const double mrr = (1.0 + 1.0 / 3 + 1.0 / 2 + 1.0 / 5 + 1.0 + 1.0 / 4) / 6;
  CHECK(mean_reciprocal_rank(ranks) == doctest::Approx(mrr).epsilon(1e-15));

  const auto h2 = hits_at(ranks, 2);
  CHECK(h2 == std::vector<char>{1, 0, 1, 0, 1, 0});
  double mean = 0.0;
  for (char h : h2) mean += h;
  CHECK(mean / double(h2.size()) == hit_ratio(ranks, 2));

  CHECK_THROWS_AS(hit_ratio({}, 1), DataError);
  CHECK_THROWS_AS(hit_ratio(ranks, 0), ConfigError);
  CHECK_THROWS_AS(mean_reciprocal_rank({}), DataError);
  CHECK_THROWS_AS(hits_at(ranks, 0), ConfigError);
}

TEST_CASE("mrr telescopes over the hit curve") {
  // With no rank past the catalog, mrr equals sum_k (hr(k)-hr(k-1))/k.
  Rng rng(2024);
  const size_t catalog = 17;
  std::vector<size_t> ranks;
  for (int i = 0; i < 400; ++i)
    ranks.push_back(1 + rng.uniform_int(catalog));
  double telescoped = 0.0, prev = 0.0;
  for (size_t k = 1; k <= catalog; ++k) {
    const double hr = hit_ratio(ranks, int(k));
    telescoped += (hr - prev) / double(k);
    prev = hr;
  }
  CHECK(mean_reciprocal_rank(ranks) ==
        doctest::Approx(telescoped).epsilon(1e-12));
}

TEST_CASE("evaluate reports ranks, metrics and missing targets") {
  const std::vector<std::string> catalog = {"a", "b", "c", "d"};
  // Fixed order: c best, then a, d, b.
  const FixedRanker ranker(catalog, {2, 0, 3, 1});
  const std::vector<ViewingEvent> test = {
      event_with_genre("c"), event_with_genre("a"), event_with_genre("b"),
      event_with_genre("ghost"), event_with_genre("c")};
  const auto report = evaluate(ranker, test, {1, 3});
  CHECK(report.method == "fixed");
  CHECK(report.n_queries == 5);
  CHECK(report.catalog_size == 4);
  CHECK(report.missing_targets == 1);
  CHECK(report.ranks == std::vector<size_t>{1, 2, 4, 5, 1});
  CHECK(report.hr.at(1) == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
  CHECK(report.hr.at(3) == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(report.mrr ==
        doctest::Approx((1.0 + 0.5 + 0.25 + 0.2 + 1.0) / 5).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate(ranker, {}, {1}), DataError);
}

TEST_CASE("evaluation is identical at any thread count") {
  GenConfig gen;
  gen.n_households = 15;
  gen.n_days = 6;
  gen.n_genres = 10;
  gen.n_top_genres = 2;
  const auto events = DataGenerator(gen).generate();
  const auto [train, test] = temporal_split(events, 0.8);
  std::vector<std::string> catalog;
  for (int g = 0; g < 10; ++g)
    catalog.push_back(DataGenerator(gen).genre_name(g));

  ToppopTemporalRanker toppop(catalog);
  toppop.fit(train);
  RandomRanker random(catalog, 31);

#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const auto t1 = evaluate(toppop, test, {1, 3});
  const auto r1 = evaluate(random, test, {1, 3});
#ifdef _OPENMP
  omp_set_num_threads(3);
#endif
  const auto t3 = evaluate(toppop, test, {1, 3});
  const auto r3 = evaluate(random, test, {1, 3});
#ifdef _OPENMP
  omp_set_num_threads(omp_get_num_procs());
#endif
  CHECK(t1.ranks == t3.ranks);
  CHECK(t1.mrr == t3.mrr);
  CHECK(r1.ranks == r3.ranks);
  CHECK(r1.mrr == r3.mrr);
}

TEST_CASE("mcnemar exact branch matches the closed form") {
  // b = 10, c = 2: p = 2 * (C(12,0)+C(12,1)+C(12,2)) / 2^12 = 158/4096.
  std::vector<char> a, b;
  for (int i = 0; i < 10; ++i) { a.push_back(1); b.push_back(0); }
  for (int i = 0; i < 2; ++i) { a.push_back(0); b.push_back(1); }
  for (int i = 0; i < 20; ++i) { a.push_back(1); b.push_back(1); }
  const auto r = mcnemar(a, b);
  CHECK(r.b == 10);
  CHECK(r.c == 2);
  CHECK(r.exact);
  CHECK(r.p_value == doctest::Approx(158.0 / 4096.0).epsilon(1e-12));

  const auto swapped = mcnemar(b, a);
  CHECK(swapped.b == 2);
  CHECK(swapped.c == 10);
  CHECK(swapped.p_value == doctest::Approx(r.p_value).epsilon(1e-15));
}

TEST_CASE("mcnemar degenerate and boundary cases") {
  const std::vector<char> same = {1, 0, 1, 1, 0};
  const auto none = mcnemar(same, same);
  CHECK(none.b == 0);
  CHECK(none.c == 0);
  CHECK(none.exact);
  CHECK(none.p_value == 1.0);

  // b = c keeps the exact p at 1 (sum over i <= n/2 doubles to >= 1).
  std::vector<char> a, b;
  for (int i = 0; i < 4; ++i) { a.push_back(1); b.push_back(0); }
  for (int i = 0; i < 4; ++i) { a.push_back(0); b.push_back(1); }
  CHECK(mcnemar(a, b).p_value == 1.0);

  CHECK_THROWS_AS(mcnemar({1, 0}, {1}), DataError);
}

TEST_CASE("mcnemar switches to chi squared at 25 discordant pairs") {
  auto discordant = [](size_t nb, size_t nc) {
    std::vector<char> a, b;
    for (size_t i = 0; i < nb; ++i) { a.push_back(1); b.push_back(0); }
    for (size_t i = 0; i < nc; ++i) { a.push_back(0); b.push_back(1); }
    return mcnemar(a, b);
  };
  CHECK(discordant(12, 12).exact);        // 24 pairs
  CHECK(!discordant(13, 12).exact);       // 25 pairs

  // b = 30, c = 10: statistic (|20|-1)^2/40 = 9.025, p about 0.00266.
  const auto r = discordant(30, 10);
  CHECK(!r.exact);
  CHECK(r.statistic == doctest::Approx(9.025).epsilon(1e-12));
  CHECK(std::abs(r.p_value - 0.00266) < 2e-4);
  // And the implementation's own identity: erfc(sqrt(x/2)).
  CHECK(r.p_value ==
        doctest::Approx(std::erfc(std::sqrt(9.025 / 2.0))).epsilon(1e-12));
}

TEST_CASE("report csv files carry the documented columns") {
  const std::vector<std::string> catalog = {"a", "b", "c"};
  const FixedRanker ranker(catalog, {0, 1, 2});
  const std::vector<ViewingEvent> test = {event_with_genre("a"),
                                          event_with_genre("c")};
  const auto report = evaluate(ranker, test, {1, 2});

  write_metrics_csv("tmp_metrics.csv", {report});
  const std::string metrics = slurp("tmp_metrics.csv");
  CHECK(metrics.find("method,metric,k,value\n") == 0);
  CHECK(metrics.find("fixed,hr,1,0.500000\n") != std::string::npos);
  CHECK(metrics.find("fixed,mrr,,0.666667\n") != std::string::npos);

  write_hit_curve_csv("tmp_curve.csv", {report});
  const std::string curve = slurp("tmp_curve.csv");
  CHECK(curve.find("method,k,hit_ratio\n") == 0);
  CHECK(curve.find("fixed,3,1.000000\n") != std::string::npos);

  write_mcnemar_csv("tmp_mcnemar.csv", {report, report});
  const std::string pairs = slurp("tmp_mcnemar.csv");
  CHECK(pairs.find("method_a,method_b,k,b,c,test,statistic,p_value\n") == 0);
  CHECK(pairs.find("fixed,fixed,1,0,0,exact,,1.000000000\n") !=
        std::string::npos);

  std::remove("tmp_metrics.csv");
  std::remove("tmp_curve.csv");
  std::remove("tmp_mcnemar.csv");
}
