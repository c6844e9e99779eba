#pragma once

// JSON documents for trees, templates, endofunctions, meet trees, permutation
// actions and wreath specs, plus the result payloads printed by the CLI.
// Output uses insertion-ordered objects so that printed documents are stable.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "omegatree/equivalence.hpp"
#include "omegatree/error.hpp"
#include "omegatree/group_actions.hpp"
#include "omegatree/meet_trees.hpp"
#include "omegatree/surjection.hpp"
#include "omegatree/template.hpp"
#include "omegatree/tree.hpp"

namespace omt::io {

using json = nlohmann::ordered_json;

/// Runs f, turning JSON access errors into invalid_input naming the document kind.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw invalid_input(std::string("malformed ") + what + ": " + e.what());
  }
}

inline json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw invalid_input(origin + " is not valid JSON: " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open \"" + path + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), "\"" + path + "\"");
}

// --- trees ------------------------------------------------------------------

inline std::vector<NodeRecord> records_from_json(const json& j) {
  if (!j.contains("nodes") || !j.at("nodes").is_array()) throw invalid_input("tree document has no \"nodes\" array");
  std::vector<NodeRecord> records;
  for (const auto& n : j.at("nodes")) {
    NodeRecord r;
    r.id = n.at("id").get<std::string>();
    if (n.contains("parent") && !n.at("parent").is_null()) r.parent = n.at("parent").get<std::string>();
    records.push_back(std::move(r));
  }
  return records;
}

/// {"name", "depth", "nodes": [{"id", "parent"}]}; "depth" and "name" are
/// optional, and a boundary_is_cut flag is accepted and ignored.
inline TruncatedTree tree_from_json(const json& j) {
  return guarded("tree document", [&] {
    if (!j.is_object()) throw invalid_input("tree document must be an object");
    std::optional<std::size_t> depth;
    if (j.contains("depth")) depth = j.at("depth").get<std::size_t>();
    std::string name = j.contains("name") ? j.at("name").get<std::string>() : "";
    return TruncatedTree::from_records(records_from_json(j), depth, std::move(name));
  });
}

inline json tree_to_json(const TruncatedTree& t) {
  json nodes = json::array();
  for (NodeIndex x = 0; x < t.size(); ++x)
    nodes.push_back({{"id", t.id(x)}, {"parent", t.parent(x) == no_node ? json(nullptr) : json(t.id(t.parent(x)))}});
  return {{"name", t.name()}, {"depth", t.depth()}, {"nodes", std::move(nodes)}};
}

inline json ids(const TruncatedTree& t, const std::vector<NodeIndex>& nodes) {
  json out = json::array();
  for (NodeIndex x : nodes) out.push_back(t.id(x));
  return out;
}

inline NodeSet node_set_from_ids(const TruncatedTree& t, const std::vector<std::string>& names) {
  NodeSet s;
  for (const auto& n : names) s.push_back(t.index_of(n));
  return detail::normalized(std::move(s));
}

// --- templates --------------------------------------------------------------

inline json template_to_json(const Template& tpl) {
  json levels = json::array();
  for (std::size_t k = 0; k < tpl.levels.size(); ++k) {
    json blocks = json::array();
    for (const auto& b : tpl.levels[k]) {
      json labels = json::array();
      for (const auto& l : b.labels) labels.push_back(json::array({tpl.block(k + 1, l.target).id, l.count}));
      blocks.push_back({{"block", b.id}, {"size", b.size}, {"labels", std::move(labels)}});
    }
    levels.push_back(std::move(blocks));
  }
  return {{"depth", tpl.depth}, {"levels", std::move(levels)}};
}

inline Template template_from_json(const json& j) {
  return guarded("template", [&] {
    Template tpl;
    tpl.depth = j.at("depth").get<std::size_t>();
    const auto& levels = j.at("levels");
    for (const auto& blocks : levels) {
      std::vector<TemplateBlock> level;
      for (const auto& b : blocks) level.push_back({b.at("block").get<std::string>(), b.at("size").get<std::size_t>(), {}});
      tpl.levels.push_back(std::move(level));
    }
    // Label targets are block ids on the next level; resolve after all blocks are known.
    for (std::size_t k = 0; k < tpl.levels.size(); ++k) {
      std::size_t i = 0;
      for (const auto& b : levels.at(k)) {
        if (b.contains("labels"))
          for (const auto& l : b.at("labels")) {
            if (!l.is_array() || l.size() != 2) throw invalid_input("template label must be [targetBlock, count]");
            if (k + 1 >= tpl.levels.size())
              throw invalid_input("block \"" + tpl.levels[k][i].id + "\" on the top level carries labels");
            std::size_t target = tpl.block_index(k + 1, l.at(0).get<std::string>());
            tpl.levels[k][i].labels.push_back({target, l.at(1).get<std::size_t>()});
          }
        ++i;
      }
    }
    tpl.validate();
    return tpl;
  });
}

inline json branch_to_json(const Template& tpl, const BlockBranch& b) {
  json out = json::array();
  for (std::size_t k = 0; k < b.size(); ++k) out.push_back(tpl.block(k, b[k]).id);
  return out;
}

// --- endofunctions ----------------------------------------------------------

inline EndofunctionSpec endofunction_from_json(const json& j) {
  return guarded("endofunction spec", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "builtin") {
      const std::string family = j.at("family").get<std::string>();
      if (family == "pred") return EndofunctionSpec::pred();
      if (family == "div") return EndofunctionSpec::div(j.at("k").get<std::uint64_t>());
      throw invalid_input("unknown builtin family \"" + family + "\"");
    }
    if (kind == "table") {
      auto map = j.at("map").get<std::map<std::string, std::string>>();
      std::optional<std::map<std::string, std::vector<std::string>>> pre;
      if (j.contains("preimages")) pre = j.at("preimages").get<std::map<std::string, std::vector<std::string>>>();
      return EndofunctionSpec::table(std::move(map), std::move(pre));
    }
    throw invalid_input("unknown endofunction kind \"" + kind + "\"");
  });
}

// --- meet trees -------------------------------------------------------------

/// Tree document whose nodes carry "in_T" (default true), plus
/// "special": [{"node", "leastOfCone"}].
inline FiniteMeetTree meet_tree_from_json(const json& j) {
  return guarded("meet tree document", [&] {
    TruncatedTree t = tree_from_json(j);
    std::vector<bool> in_t(t.size(), true);
    std::size_t i = 0;
    for (const auto& n : j.at("nodes")) {
      if (n.contains("in_T")) in_t[i] = n.at("in_T").get<bool>();
      ++i;
    }
    std::vector<std::pair<std::string, std::string>> special;
    if (j.contains("special"))
      for (const auto& s : j.at("special"))
        special.emplace_back(s.at("node").get<std::string>(), s.at("leastOfCone").get<std::string>());
    return FiniteMeetTree::make(std::move(t), std::move(in_t), special);
  });
}

inline json meet_tree_to_json(const FiniteMeetTree& m) {
  const auto& t = m.tree();
  json doc = tree_to_json(t);
  for (NodeIndex x = 0; x < t.size(); ++x) doc["nodes"][x]["in_T"] = m.in_t(x);
  json special = json::array();
  for (const auto& [x, least] : m.special())
    for (NodeIndex l : least) special.push_back({{"node", t.id(x)}, {"leastOfCone", t.id(l)}});
  doc["special"] = std::move(special);
  return doc;
}

inline json code_to_json(const Code& c) {
  return {{"ramificationOrders", c.ramification_orders}, {"pointOrder", c.point_orders}, {"observed", c.observed}};
}

inline json decomposition_to_json(const FiniteMeetTree& m, const Decomposition& d) {
  const auto& t = m.tree();
  auto end = [&](const std::optional<NodeIndex>& a) { return a ? json(t.id(*a)) : json("-inf"); };
  json upper = json::array();
  for (const auto& u : d.upper) upper.push_back({{"a", end(u.a)}, {"nodes", ids(t, u.nodes)}});
  json intervals = json::array();
  for (const auto& iv : d.intervals) {
    json branches = json::array();
    for (const auto& br : iv.branches) branches.push_back({{"x", t.id(br.x)}, {"nodes", ids(t, br.nodes)}});
    intervals.push_back({{"a", end(iv.a)},
                         {"b", t.id(iv.b)},
                         {"L", ids(t, iv.linear)},
                         {"S", ids(t, iv.side)},
                         {"C", std::move(branches)}});
  }
  return {{"closure", ids(t, d.closure)}, {"U", std::move(upper)}, {"intervals", std::move(intervals)}};
}

// --- equivalence ------------------------------------------------------------

inline json embedding_to_json(const Embedding& e) {
  json image = json::object();
  for (const auto& [k, v] : e.image) image[k] = v;
  return image;
}

inline json game_result_to_json(const GameResult& g) {
  json out = {{"equivalent", g.equivalent}, {"rank", g.rank}};
  if (!g.equivalent) {
    json line = json::array();
    for (const auto& m : g.witness)
      line.push_back({{"round", m.round},
                      {"structure", m.side},
                      {"spoiler", m.spoiler},
                      {"duplicator", m.duplicator ? json(*m.duplicator) : json(nullptr)}});
    out["witness"] = std::move(line);
  }
  return out;
}

// --- groups -----------------------------------------------------------------

inline PermAction perm_action_from_json(const json& j) {
  return guarded("permutation action", [&] {
    auto points = j.at("points").get<std::vector<std::string>>();
    std::vector<Perm> gens;
    for (const auto& g : j.at("generators")) {
      Perm p;
      for (const auto& v : g) {
        // Images may be given as point indices or point ids.
        if (v.is_string()) {
          auto it = std::find(points.begin(), points.end(), v.get<std::string>());
          if (it == points.end()) throw invalid_input("generator names unknown point \"" + v.get<std::string>() + "\"");
          p.push_back(static_cast<Point>(it - points.begin()));
        } else {
          p.push_back(v.get<Point>());
        }
      }
      gens.push_back(std::move(p));
    }
    return PermAction::make(std::move(points), std::move(gens));
  });
}

inline json perm_action_to_json(const PermAction& a) {
  json gens = json::array();
  for (const auto& g : a.generators()) gens.push_back(g);
  return {{"points", a.points()}, {"generators", std::move(gens)}};
}

inline LevelGroup level_group_from_json(const json& g) {
  if (g.is_string()) {
    const auto s = g.get<std::string>();
    if (s == "sym") return {LevelGroup::Kind::symmetric, {}};
    if (s == "cyclic") return {LevelGroup::Kind::cyclic, {}};
    throw invalid_input("unknown level group \"" + s + "\" (expected sym, cyclic or {\"generators\": ...})");
  }
  return {LevelGroup::Kind::explicit_generators, g.at("generators").get<std::vector<Perm>>()};
}

inline WreathSpec wreath_spec_from_json(const json& j) {
  return guarded("wreath spec", [&] {
    WreathSpec spec;
    for (const auto& l : j.at("levels"))
      spec.levels.push_back({l.at("size").get<std::size_t>(), level_group_from_json(l.at("group"))});
    validate(spec);
    return spec;
  });
}

inline json wreath_spec_to_json(const WreathSpec& spec) {
  json levels = json::array();
  for (const auto& l : spec.levels) {
    json g;
    switch (l.group.kind) {
      case LevelGroup::Kind::symmetric: g = "sym"; break;
      case LevelGroup::Kind::cyclic: g = "cyclic"; break;
      case LevelGroup::Kind::explicit_generators: g = {{"generators", l.group.generators}}; break;
    }
    levels.push_back({{"size", l.size}, {"group", std::move(g)}});
  }
  return {{"levels", std::move(levels)}};
}

inline json point_ids(const PermAction& a, const PointSet& s) {
  json out = json::array();
  for (Point x : s) out.push_back(a.point(x));
  return out;
}

inline json probe_to_json(const PermAction& a, const ProbeReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"size", row.subset_size},
                    {"checked", row.subsets_checked},
                    {"sampled", row.sampled},
                    {"maxDcl", row.max_dcl}});
  json exceeding = json::array();
  for (const auto& s : r.exceeding) exceeding.push_back(point_ids(a, s));
  return {{"maxA", r.max_a},
          {"threshold", r.threshold},
          {"maxDcl", r.max_dcl},
          {"bySize", std::move(rows)},
          {"exceeding", std::move(exceeding)}};
}

}  // namespace omt::io
