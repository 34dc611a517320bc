#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "jcce/datagen.hpp"
#include "jcce/event.hpp"
#include "jcce/schema.hpp"

using namespace jcce;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default schema shape") {
  const Schema s = default_schema();
  s.validate();
  CHECK(s.side_attrs(AttrSide::context).size() == 9);
  CHECK(s.side_attrs(AttrSide::content).size() == 2);
  REQUIRE(s.find("viewer_ids") != nullptr);
  CHECK(s.find("viewer_ids")->kind == AttrKind::multi_categorical);
  REQUIRE(s.find("time_slot") != nullptr);
  CHECK(s.find("time_slot")->kind == AttrKind::categorical);
  REQUIRE(s.find("weekend") != nullptr);
  CHECK(s.find("weekend")->kind == AttrKind::binary);
  REQUIRE(s.find("genre") != nullptr);
  CHECK(s.find("genre")->side == AttrSide::content);
  CHECK(s.find("nope") == nullptr);
}

TEST_CASE("schema json round trip") {
  const Schema s = default_schema();
  const Schema back = Schema::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(back.version == s.version);
  CHECK(back.attributes.size() == s.attributes.size());
}

TEST_CASE("duplicate attribute names are rejected") {
  Schema s;
  s.version = "dup";
  s.attributes = {{"a", AttrKind::categorical, AttrSide::context},
                  {"a", AttrKind::binary, AttrSide::context}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("kind and side names round trip") {
  for (const AttrKind k : {AttrKind::categorical, AttrKind::multi_categorical,
                           AttrKind::binary})
    CHECK(attr_kind_from_name(attr_kind_name(k)) == k);
  for (const AttrSide s : {AttrSide::context, AttrSide::content})
    CHECK(attr_side_from_name(attr_side_name(s)) == s);
  CHECK_THROWS_AS(attr_kind_from_name("bogus"), ConfigError);
  CHECK_THROWS_AS(attr_side_from_name("bogus"), ConfigError);
}

TEST_CASE("timestamp formatting") {
  CHECK(format_timestamp(0) == "1970-01-01T00:00:00Z");
  CHECK(format_timestamp(1740000000) == "2025-02-19T21:20:00Z");
  CHECK(parse_timestamp("2025-02-19T21:20:00Z") == 1740000000);
  for (const int64_t t : {int64_t(1), int64_t(951782400), int64_t(1740000000)})
    CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK_THROWS_AS(parse_timestamp("2025-02-19 20:40:00"), DataError);
  CHECK_THROWS_AS(parse_timestamp("not a date"), DataError);
}

TEST_CASE("event validation") {
  ViewingEvent ev;
  ev.timestamp = 100;
  ev.household_id = "h1";
  ev.viewer_ids = {"u1"};
  ev.duration_minutes = 30;
  ev.genre = "g1";
  ev.top_genre = "t1";
  CHECK_NOTHROW(ev.validate(0));

  ViewingEvent bad = ev;
  bad.viewer_ids.clear();
  CHECK_THROWS_AS(bad.validate(0), DataError);
  bad = ev;
  bad.duration_minutes = 0;
  CHECK_THROWS_AS(bad.validate(0), DataError);
  bad = ev;
  bad.genre.clear();
  CHECK_THROWS_AS(bad.validate(0), DataError);
  CHECK_THROWS_AS(ev.attr("missing"), DataError);
}

TEST_CASE("csv escaping") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto fields = csv_split("a,\"b,c\",\"d\"\"e\"", 1);
  REQUIRE(fields.size() == 3);
  CHECK(fields[0] == "a");
  CHECK(fields[1] == "b,c");
  CHECK(fields[2] == "d\"e");
  CHECK_THROWS_AS(csv_split("\"unterminated", 1), DataError);
}

TEST_CASE("event columns follow the schema order") {
  const Schema s = default_schema();
  const auto cols = event_columns(s);
  REQUIRE(cols.size() >= 6);
  CHECK(cols[0] == "timestamp");
  CHECK(cols[1] == "household_id");
  CHECK(cols[2] == "viewer_ids");
  CHECK(cols[3] == "duration_min");
  CHECK(cols[cols.size() - 2] == "genre");
  CHECK(cols.back() == "top_genre");
}

TEST_CASE("event log round trips byte for byte") {
  GenConfig cfg;
  cfg.n_households = 12;
  cfg.n_days = 4;
  cfg.n_genres = 10;
  cfg.n_top_genres = 2;
  const auto events = DataGenerator(cfg).generate();
  REQUIRE(events.size() > 100);
  const Schema schema = default_schema();
  save_events(events, schema, "events_rt_a.csv");
  const auto loaded = load_events("events_rt_a.csv", schema);
  REQUIRE(loaded.size() == events.size());
  save_events(loaded, schema, "events_rt_b.csv");
  CHECK(slurp("events_rt_a.csv") == slurp("events_rt_b.csv"));
  std::remove("events_rt_a.csv");
  std::remove("events_rt_b.csv");
}

TEST_CASE("event log io errors") {
  const Schema schema = default_schema();
  CHECK_THROWS_AS(load_events("does_not_exist.csv", schema), IoError);
  std::ofstream("bad_header.csv") << "timestamp,household_id\n";
  CHECK_THROWS_AS(load_events("bad_header.csv", schema), DataError);
  std::remove("bad_header.csv");
}
