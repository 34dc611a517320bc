#pragma once

#include <string>
#include <vector>

#include "jcce/error.hpp"

namespace jcce {

enum class AttrKind { categorical, multi_categorical, binary };
enum class AttrSide { context, content };

struct AttributeDef {
  std::string name;
  AttrKind kind = AttrKind::categorical;
  AttrSide side = AttrSide::context;
};

// Ordered attribute list; the order fixes the sparse index layout and the
// event-log column order.
struct Schema {
  std::string version;
  std::vector<AttributeDef> attributes;

  const AttributeDef* find(const std::string& name) const;
  std::vector<const AttributeDef*> side_attrs(AttrSide side) const;
  void validate() const;

  std::string to_json() const;
  static Schema from_json(const std::string& text);
  static Schema load(const std::string& path);
  void save(const std::string& path) const;
};

// Built-in schema: 9 context attributes + 2 content attributes.
Schema default_schema();

std::string attr_kind_name(AttrKind k);
std::string attr_side_name(AttrSide s);
AttrKind attr_kind_from_name(const std::string& s);
AttrSide attr_side_from_name(const std::string& s);

}  // namespace jcce
