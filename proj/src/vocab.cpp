#include "jcce/vocab.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jcce/rng.hpp"
#include "json.hpp"

namespace jcce {

const Vocabulary& VocabSet::at(const std::string& attr) const {
  auto it = by_attr.find(attr);
  if (it == by_attr.end())
    throw ConfigError("no vocabulary for attribute: " + attr);
  return it->second;
}

const SparseLayout::Block& SparseLayout::block(const std::string& attr) const {
  for (const auto& b : blocks)
    if (b.attr == attr) return b;
  throw ConfigError("no layout block for attribute: " + attr);
}

SparseLayout make_layout(const Schema& schema, const VocabSet& vocabs,
                         AttrSide side) {
  SparseLayout layout;
  size_t offset = 0;
  for (const auto& a : schema.attributes) {
    if (a.side != side) continue;
    size_t width = 1;  // binary
    if (a.kind != AttrKind::binary) width = vocabs.at(a.name).cardinality() + 1;
    layout.blocks.push_back({a.name, a.kind, offset, width});
    offset += width;
  }
  layout.dim = offset;
  return layout;
}

static void observe(std::map<std::string, std::map<std::string, int64_t>>& acc,
                    const std::string& attr, const std::string& value) {
  acc[attr][value] += 1;
}

VocabSet build_vocabularies(const std::vector<ViewingEvent>& events,
                            const Schema& schema) {
  if (events.empty())
    throw DataError("cannot build vocabularies from an empty event list");
  std::map<std::string, std::map<std::string, int64_t>> acc;
  VocabSet out;
  for (size_t pos = 0; pos < events.size(); ++pos) {
    const ViewingEvent& ev = events[pos];
    for (const auto& a : schema.attributes) {
      if (a.kind == AttrKind::binary) continue;
      if (a.name == "household_id") {
        observe(acc, a.name, ev.household_id);
      } else if (a.name == "viewer_ids") {
        for (const auto& v : ev.viewer_ids) observe(acc, a.name, v);
      } else if (a.name == "genre") {
        observe(acc, a.name, ev.genre);
      } else if (a.name == "top_genre") {
        observe(acc, a.name, ev.top_genre);
      } else {
        auto it = ev.attrs.find(a.name);
        if (it == ev.attrs.end())
          throw DataError("event " + std::to_string(pos) +
                          " is missing attribute '" + a.name + "'");
        observe(acc, a.name, it->second);
      }
    }
    auto [it, inserted] = out.genre_to_top.emplace(ev.genre, ev.top_genre);
    if (!inserted && it->second != ev.top_genre)
      throw DataError("event " + std::to_string(pos) + ": genre '" + ev.genre +
                      "' maps to top genres '" + it->second + "' and '" +
                      ev.top_genre + "'");
  }
  for (const auto& [attr, value_counts] : acc) {
    Vocabulary v;
    for (const auto& [value, count] : value_counts) {  // map: sorted order
      v.to_index[value] = v.values.size();
      v.values.push_back(value);
      v.counts.push_back(count);
    }
    out.by_attr[attr] = std::move(v);
  }
  return out;
}

std::string VocabSet::to_json() const {
  nlohmann::json j;
  for (const auto& [attr, v] : by_attr) {
    j["attributes"][attr] = {{"values", v.values}, {"counts", v.counts}};
  }
  j["genre_to_top"] = genre_to_top;
  return j.dump(2);
}

VocabSet VocabSet::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("vocab file is not valid JSON: ") + e.what());
  }
  VocabSet out;
  try {
    for (const auto& [attr, jv] : j.at("attributes").items()) {
      Vocabulary v;
      v.values = jv.at("values").get<std::vector<std::string>>();
      v.counts = jv.at("counts").get<std::vector<int64_t>>();
      for (size_t i = 0; i < v.values.size(); ++i) v.to_index[v.values[i]] = i;
      out.by_attr[attr] = std::move(v);
    }
    out.genre_to_top =
        j.at("genre_to_top").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("vocab file missing field: ") + e.what());
  }
  return out;
}

VocabSet VocabSet::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open vocab file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

void VocabSet::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write vocab file: " + path);
  f << to_json() << "\n";
}

std::string schema_fingerprint(const Schema& schema, const VocabSet& vocabs) {
  uint64_t h = fnv1a64(schema.version);
  for (const auto& a : schema.attributes) {
    h = fnv1a64(a.name, h);
    h = fnv1a64(attr_kind_name(a.kind), h);
    h = fnv1a64(attr_side_name(a.side), h);
  }
  for (const auto& [attr, v] : vocabs.by_attr) {
    h = fnv1a64(attr, h);
    for (const auto& value : v.values) h = fnv1a64(value, h);
  }
  for (const auto& [g, t] : vocabs.genre_to_top) {
    h = fnv1a64(g, h);
    h = fnv1a64(t, h);
  }
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jcce
