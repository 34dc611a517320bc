#include "jcce/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace jcce {

const AttributeDef* Schema::find(const std::string& name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a;
  return nullptr;
}

std::vector<const AttributeDef*> Schema::side_attrs(AttrSide side) const {
  std::vector<const AttributeDef*> out;
  for (const auto& a : attributes)
    if (a.side == side) out.push_back(&a);
  return out;
}

void Schema::validate() const {
  std::set<std::string> seen;
  for (const auto& a : attributes) {
    if (!seen.insert(a.name).second)
      throw ConfigError("duplicate attribute name in schema: " + a.name);
  }
  if (side_attrs(AttrSide::context).empty())
    throw ConfigError("schema needs at least one context attribute");
  if (side_attrs(AttrSide::content).empty())
    throw ConfigError("schema needs at least one content attribute");
  if (!find("genre") || !find("top_genre"))
    throw ConfigError("schema must define genre and top_genre content attributes");
}

std::string attr_kind_name(AttrKind k) {
  switch (k) {
    case AttrKind::categorical: return "categorical";
    case AttrKind::multi_categorical: return "multi_categorical";
    case AttrKind::binary: return "binary";
  }
  return "?";
}

std::string attr_side_name(AttrSide s) {
  return s == AttrSide::context ? "context" : "content";
}

AttrKind attr_kind_from_name(const std::string& s) {
  if (s == "categorical") return AttrKind::categorical;
  if (s == "multi_categorical") return AttrKind::multi_categorical;
  if (s == "binary") return AttrKind::binary;
  throw ConfigError("unknown attribute kind: " + s);
}

AttrSide attr_side_from_name(const std::string& s) {
  if (s == "context") return AttrSide::context;
  if (s == "content") return AttrSide::content;
  throw ConfigError("unknown attribute side: " + s);
}

std::string Schema::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["attributes"] = nlohmann::json::array();
  for (const auto& a : attributes) {
    j["attributes"].push_back({{"name", a.name},
                               {"kind", attr_kind_name(a.kind)},
                               {"side", attr_side_name(a.side)}});
  }
  return j.dump(2);
}

Schema Schema::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema file is not valid JSON: ") + e.what());
  }
  Schema s;
  try {
    s.version = j.at("version").get<std::string>();
    for (const auto& a : j.at("attributes")) {
      AttributeDef d;
      d.name = a.at("name").get<std::string>();
      d.kind = attr_kind_from_name(a.at("kind").get<std::string>());
      d.side = attr_side_from_name(a.at("side").get<std::string>());
      s.attributes.push_back(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema file missing field: ") + e.what());
  }
  s.validate();
  return s;
}

Schema Schema::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open schema file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

void Schema::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write schema file: " + path);
  f << to_json() << "\n";
}

Schema default_schema() {
  Schema s;
  s.version = "tv-default-v1";
  s.attributes = {
      {"household_id", AttrKind::categorical, AttrSide::context},
      {"viewer_ids", AttrKind::multi_categorical, AttrSide::context},
      {"viewer_count_band", AttrKind::categorical, AttrSide::context},
      {"child_present", AttrKind::binary, AttrSide::context},
      {"day_of_week", AttrKind::categorical, AttrSide::context},
      {"time_slot", AttrKind::categorical, AttrSide::context},
      {"weekend", AttrKind::binary, AttrSide::context},
      {"region", AttrKind::categorical, AttrSide::context},
      {"household_size_band", AttrKind::categorical, AttrSide::context},
      {"genre", AttrKind::categorical, AttrSide::content},
      {"top_genre", AttrKind::categorical, AttrSide::content},
  };
  return s;
}

}  // namespace jcce
