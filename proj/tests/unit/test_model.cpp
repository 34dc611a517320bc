#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "jcce/model.hpp"
#include "test_helpers.hpp"

using namespace jcce;
using jcce::testing::tiny_model;

namespace {

SparseVec ctx(const JcceModel& model, const std::string& value) {
  return model.features().encode_context_query({{"ctx", value}});
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("hand built model scores match closed forms") {
  const JcceModel model = tiny_model();
  CHECK(model.embedding_dim() == 2);
  CHECK(model.catalog() == std::vector<std::string>{"g1", "g2"});
  const double s = 1.0 / std::sqrt(2.0);

  CHECK(model.score(ctx(model, "a"), "g1") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.score(ctx(model, "a"), "g2") == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(model.score(ctx(model, "b"), "g1") == doctest::Approx(s).epsilon(1e-12));
  CHECK(model.score(ctx(model, "b"), "g2") == doctest::Approx(s).epsilon(1e-12));

  const auto scores = model.score_catalog(ctx(model, "a"));
  REQUIRE(scores.size() == 2);
  CHECK(scores[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scores[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("recommend orders by score and clamps k") {
  const JcceModel model = tiny_model();
  const auto top = model.recommend(ctx(model, "a"), 10);
  REQUIRE(top.size() == 2);  // k clamps to the catalog
  CHECK(top[0].genre == "g1");
  CHECK(top[1].genre == "g2");
  CHECK(top[0].score > top[1].score);

  const auto one = model.recommend(ctx(model, "a"), 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].genre == "g1");

  CHECK_THROWS_AS(model.recommend(ctx(model, "a"), 0), ConfigError);
}

TEST_CASE("exact ties break toward the lower catalog index") {
  const JcceModel model = tiny_model();
  // Context "b" scores both genres at exactly 1/sqrt(2).
  const auto top = model.recommend(ctx(model, "b"), 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].score == top[1].score);
  CHECK(top[0].genre == "g1");
  CHECK(top[1].genre == "g2");
  CHECK(model.rank_of(ctx(model, "b"), "g1") == 1);
  CHECK(model.rank_of(ctx(model, "b"), "g2") == 2);
}

TEST_CASE("rank_of matches the recommendation order") {
  const JcceModel model = tiny_model();
  CHECK(model.rank_of(ctx(model, "a"), "g1") == 1);
  CHECK(model.rank_of(ctx(model, "a"), "g2") == 2);
  // Outside the catalog: one past the end.
  CHECK(model.rank_of(ctx(model, "a"), "zzz") == 3);
  CHECK_THROWS_AS(model.score(ctx(model, "a"), "zzz"), DataError);
}

TEST_CASE("zero norm embeddings are rejected") {
  JcceModel model = tiny_model();
  // Unknown context value hits the OOV slot, whose weight row is zero.
  const SparseVec oov = model.features().encode_context_query({{"ctx", "nope"}});
  CHECK_THROWS_AS(model.score_catalog(oov), DataError);

  // Zero the content tower: every catalog entry becomes degenerate.
  model.content_encoder().parameters()[0]->value.fill(0.0);
  model.refresh_catalog();
  CHECK_THROWS_AS(model.score_catalog(ctx(model, "a")), DataError);
}

TEST_CASE("refresh_catalog picks up weight changes") {
  JcceModel model = tiny_model();
  const double before = model.score(ctx(model, "a"), "g2");
  CHECK(before == doctest::Approx(0.0).epsilon(1e-12));
  // Point g2 at [1,0] too; without refresh the cache still says otherwise.
  Tensor& wg = model.content_encoder().parameters()[0]->value;
  wg(1, 0) = 1.0;
  wg(1, 1) = 0.0;
  model.refresh_catalog();
  CHECK(model.score(ctx(model, "a"), "g2") ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("save and load round trip bytes and rankings") {
  const JcceModel model = tiny_model();
  const std::string path = "tmp_model_roundtrip.json";
  model.save(path);
  const std::string bytes = slurp(path);
  CHECK(bytes == model.to_json());

  const JcceModel back = JcceModel::load(path);
  CHECK(back.to_json() == model.to_json());
  CHECK(back.fingerprint() == model.fingerprint());
  for (const std::string& value : {"a", "b"}) {
    const auto a = model.recommend(ctx(model, value), 2);
    const auto b = back.recommend(ctx(back, value), 2);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].genre == b[i].genre);
      CHECK(a[i].score == b[i].score);
    }
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(JcceModel::load(path), IoError);
}

TEST_CASE("tampered model files fail with the right error") {
  const std::string good = tiny_model().to_json();

  CHECK_THROWS_AS(JcceModel::from_json("{broken"), ParseError);
  CHECK_THROWS_AS(JcceModel::from_json("{}"), ParseError);
  CHECK_THROWS_AS(JcceModel::from_json("[1,2]"), ParseError);

  auto j = nlohmann::json::parse(good);
  j["version"] = "jcce-model-v999";
  CHECK_THROWS_AS(JcceModel::from_json(j.dump()), VersionError);

  j = nlohmann::json::parse(good);
  j["schema_fingerprint"] = "0000000000000000";
  CHECK_THROWS_AS(JcceModel::from_json(j.dump()), FingerprintError);

  // Vocab edits change the real fingerprint, so the stored one goes stale.
  j = nlohmann::json::parse(good);
  j["vocabs"]["attributes"]["genre"]["values"] = {"g1", "g9"};
  CHECK_THROWS_AS(JcceModel::from_json(j.dump()), FingerprintError);

  j = nlohmann::json::parse(good);
  j.erase("context_encoder");
  CHECK_THROWS_AS(JcceModel::from_json(j.dump()), ParseError);
}

TEST_CASE("construction rejects mismatched towers") {
  EncoderConfig lin;
  lin.nonlinear = false;
  lin.hidden_dims = {};
  lin.embedding_dim = 2;
  lin.dropout = 0.0;
  Rng rng(1);

  {
    Encoder bad_ctx(4, lin);  // layout wants 3
    Encoder cnt(5, lin);
    bad_ctx.init_glorot(rng);
    cnt.init_glorot(rng);
    CHECK_THROWS_AS(JcceModel(testing::tiny_schema(), testing::tiny_vocabs(),
                              std::move(bad_ctx), std::move(cnt)),
                    ConfigError);
  }
  {
    EncoderConfig wide = lin;
    wide.embedding_dim = 3;
    Encoder ctx_enc(3, lin);
    Encoder cnt(5, wide);  // embedding dims differ
    ctx_enc.init_glorot(rng);
    cnt.init_glorot(rng);
    CHECK_THROWS_AS(JcceModel(testing::tiny_schema(), testing::tiny_vocabs(),
                              std::move(ctx_enc), std::move(cnt)),
                    ConfigError);
  }
}
