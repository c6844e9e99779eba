#pragma once

// Finite, rooted, level-graded trees: the depth-D truncation of an omega-tree.
//
// An omega-tree is only ever seen through its first D+1 levels.  Wherever a
// statement about omega-trees talks about "infinitely many points above x",
// code in this library reads it as "the subtree above x reaches level D".

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "omegatree/error.hpp"

namespace omt {

using NodeIndex = std::size_t;
inline constexpr NodeIndex no_node = std::numeric_limits<NodeIndex>::max();

struct NodeRecord {
  std::string id;
  std::optional<std::string> parent;
};

class TruncatedTree {
public:
  /// Validates the records and computes levels from parent chains.  Node order
  /// is preserved: index i is the i-th record.  When `declared_depth` is given
  /// it must equal the highest computed level.
  static TruncatedTree from_records(std::vector<NodeRecord> records,
                                    std::optional<std::size_t> declared_depth = std::nullopt,
                                    std::string name = {}) {
    if (records.empty()) throw invalid_input("empty node set: a tree needs a root");

    TruncatedTree t;
    t.name_ = std::move(name);
    const std::size_t n = records.size();
    t.ids_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = t.index_.emplace(records[i].id, i);
      if (!fresh) throw invalid_input("duplicate id \"" + records[i].id + "\"");
      t.ids_.push_back(records[i].id);
    }

    t.parent_.assign(n, no_node);
    std::size_t root_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!records[i].parent) {
        ++root_count;
        t.root_ = i;
        continue;
      }
      auto it = t.index_.find(*records[i].parent);
      if (it == t.index_.end())
        throw invalid_input("missing parent \"" + *records[i].parent + "\" of node \"" +
                            records[i].id + "\"");
      if (it->second == i) throw invalid_input("node \"" + records[i].id + "\" is its own parent");
      t.parent_[i] = it->second;
    }
    if (root_count == 0) throw invalid_input("no root: every node has a parent");
    if (root_count > 1) throw invalid_input("multiple roots");

    t.children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
      if (t.parent_[i] != no_node) t.children_[t.parent_[i]].push_back(i);

    // Breadth-first from the root; anything unreached sits on a parent cycle.
    t.level_.assign(n, no_node);
    t.level_[t.root_] = 0;
    std::vector<NodeIndex> frontier{t.root_};
    std::size_t reached = 1;
    while (!frontier.empty()) {
      std::vector<NodeIndex> next;
      for (NodeIndex x : frontier)
        for (NodeIndex c : t.children_[x]) {
          t.level_[c] = t.level_[x] + 1;
          next.push_back(c);
        }
      reached += next.size();
      frontier = std::move(next);
    }
    if (reached != n) {
      for (std::size_t i = 0; i < n; ++i)
        if (t.level_[i] == no_node)
          throw invalid_input("node \"" + t.ids_[i] + "\" is not connected to the root (parent cycle)");
    }

    std::size_t depth = *std::max_element(t.level_.begin(), t.level_.end());
    if (declared_depth && *declared_depth != depth)
      throw invalid_input("declared depth " + std::to_string(*declared_depth) +
                          " inconsistent with computed depth " + std::to_string(depth));
    t.levels_.assign(depth + 1, {});
    for (std::size_t i = 0; i < n; ++i) t.levels_[t.level_[i]].push_back(i);
    return t;
  }

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t depth() const noexcept { return levels_.size() - 1; }
  NodeIndex root() const noexcept { return root_; }
  const std::string& name() const noexcept { return name_; }

  const std::string& id(NodeIndex x) const { return ids_.at(x); }
  NodeIndex parent(NodeIndex x) const { return parent_.at(x); }
  std::size_t level(NodeIndex x) const { return level_.at(x); }
  std::span<const NodeIndex> children(NodeIndex x) const { return children_.at(x); }
  std::size_t degree(NodeIndex x) const { return children_.at(x).size(); }
  std::span<const NodeIndex> level_nodes(std::size_t k) const { return levels_.at(k); }
  const std::vector<std::vector<NodeIndex>>& levels() const noexcept { return levels_; }

  std::optional<NodeIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeIndex index_of(std::string_view id) const {
    if (auto x = find(id)) return *x;
    throw invalid_input("unknown node \"" + std::string(id) + "\"");
  }

  /// a <= b in the tree order (a is b or an ancestor of b).
  bool is_below_or_equal(NodeIndex a, NodeIndex b) const {
    if (level_.at(a) > level_.at(b)) return false;
    while (level_[b] > level_[a]) b = parent_[b];
    return a == b;
  }

  bool is_strictly_below(NodeIndex a, NodeIndex b) const { return a != b && is_below_or_equal(a, b); }

  /// Ancestor of x at level k (k <= level(x)).
  NodeIndex ancestor_at(NodeIndex x, std::size_t k) const {
    while (level_.at(x) > k) x = parent_[x];
    return x;
  }

  std::vector<NodeRecord> records() const {
    std::vector<NodeRecord> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
      out.push_back({ids_[i], parent_[i] == no_node ? std::nullopt
                                                    : std::optional<std::string>(ids_[parent_[i]])});
    return out;
  }

  /// Node-for-node equality: same ids with the same parents, in the same order.
  friend bool operator==(const TruncatedTree& a, const TruncatedTree& b) {
    return a.ids_ == b.ids_ && a.parent_ == b.parent_;
  }

private:
  TruncatedTree() = default;

  std::string name_;
  std::vector<std::string> ids_;
  std::vector<NodeIndex> parent_;
  std::vector<std::size_t> level_;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<std::vector<NodeIndex>> levels_;
  std::unordered_map<std::string, NodeIndex> index_;
  NodeIndex root_ = no_node;
};

/// Level sets L_0..L_depth.
inline std::vector<std::vector<NodeIndex>> levels(const TruncatedTree& t) { return t.levels(); }

/// Restriction to a downward-closed node set containing the root.  Levels are
/// unchanged; relative node order is kept.
inline TruncatedTree induced_subtree(const TruncatedTree& t, std::span<const NodeIndex> keep) {
  std::vector<bool> in(t.size(), false);
  for (NodeIndex x : keep) {
    if (x >= t.size()) throw invalid_input("node index out of range");
    in[x] = true;
  }
  if (!in[t.root()]) throw invalid_input("kept set does not contain the root");
  std::vector<NodeRecord> records;
  for (NodeIndex x = 0; x < t.size(); ++x) {
    if (!in[x]) continue;
    NodeIndex p = t.parent(x);
    if (p != no_node && !in[p])
      throw invalid_input("kept set is not downward closed: \"" + t.id(x) +
                          "\" kept without its parent \"" + t.id(p) + "\"");
    records.push_back({t.id(x), p == no_node ? std::nullopt : std::optional<std::string>(t.id(p))});
  }
  return TruncatedTree::from_records(std::move(records), std::nullopt, t.name());
}

inline TruncatedTree induced_subtree(const TruncatedTree& t, const std::vector<bool>& mask) {
  std::vector<NodeIndex> keep;
  for (NodeIndex x = 0; x < t.size() && x < mask.size(); ++x)
    if (mask[x]) keep.push_back(x);
  return induced_subtree(t, keep);
}

/// Union of levels 0..n.
inline TruncatedTree truncate(const TruncatedTree& t, std::size_t n) {
  if (n > t.depth())
    throw invalid_input("truncation level " + std::to_string(n) + " exceeds depth " +
                        std::to_string(t.depth()));
  if (n == t.depth()) return t;
  std::vector<NodeIndex> keep;
  for (NodeIndex x = 0; x < t.size(); ++x)
    if (t.level(x) <= n) keep.push_back(x);
  return induced_subtree(t, keep);
}

// ---------------------------------------------------------------------------
// Generators.  Ids are path based: the root is "0" and the i-th child of a
// node with id p is "p.i", so output is reproducible byte for byte.

namespace detail {

inline std::string child_id(const std::string& parent, std::size_t i) {
  return parent + "." + std::to_string(i);
}

// Builds a tree level by level; child_count(level, position in level) gives the
// number of children of each node.
template <typename ChildCount>
TruncatedTree grow(std::size_t depth, ChildCount&& child_count, std::string name) {
  std::vector<NodeRecord> records{{"0", std::nullopt}};
  std::vector<std::string> frontier{"0"};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<std::string> next;
    for (std::size_t pos = 0; pos < frontier.size(); ++pos) {
      std::size_t c = child_count(k, pos, frontier.size());
      for (std::size_t i = 0; i < c; ++i) {
        next.push_back(child_id(frontier[pos], i));
        records.push_back({next.back(), frontier[pos]});
      }
    }
    if (next.empty()) break;
    frontier = std::move(next);
  }
  return TruncatedTree::from_records(std::move(records), std::nullopt, std::move(name));
}

}  // namespace detail

inline constexpr std::size_t default_node_budget = 1'000'000;

/// Complete `arity`-ary tree of the given depth.
inline TruncatedTree complete_tree(std::size_t arity, std::size_t depth,
                                   std::size_t node_budget = default_node_budget) {
  if (arity < 1) throw invalid_input("arity must be at least 1");
  std::size_t total = 1, width = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    if (width > node_budget / arity) throw resource_error("complete tree exceeds node budget");
    width *= arity;
    total += width;
    if (total > node_budget) throw resource_error("complete tree exceeds node budget");
  }
  return detail::grow(
      depth, [arity](std::size_t, std::size_t, std::size_t) { return arity; },
      "complete-" + std::to_string(arity) + "-" + std::to_string(depth));
}

/// Tree from explicit per-node child counts: counts[k][i] is the number of
/// children of the i-th node of level k.  Every level's list must match the
/// width of that level exactly.
inline TruncatedTree level_spec_tree(const std::vector<std::vector<std::size_t>>& counts) {
  std::size_t width = 1;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k].size() != width)
      throw invalid_input("level " + std::to_string(k) + " lists " + std::to_string(counts[k].size()) +
                          " child counts but has " + std::to_string(width) + " nodes");
    width = 0;
    for (std::size_t c : counts[k]) width += c;
    if (width == 0 && k + 1 < counts.size())
      throw invalid_input("level " + std::to_string(k + 1) + " is empty but further levels are listed");
  }
  return detail::grow(
      counts.size(), [&](std::size_t k, std::size_t pos, std::size_t) { return counts[k][pos]; },
      "levels");
}

/// Seeded random tree reaching exactly `depth`.  Each node below the boundary
/// gets between 0 and `max_branch` children; when a level would come out
/// empty its last node is given one child instead.
inline TruncatedTree random_tree(std::uint64_t seed, std::size_t max_branch, std::size_t depth) {
  if (max_branch < 1) throw invalid_input("max branch must be at least 1");
  std::mt19937_64 rng(seed);
  std::size_t produced = 0;
  return detail::grow(
      depth,
      [&](std::size_t, std::size_t pos, std::size_t width) {
        if (pos == 0) produced = 0;
        std::size_t c = static_cast<std::size_t>(rng() % (max_branch + 1));
        if (pos + 1 == width && produced == 0 && c == 0) c = 1;
        produced += c;
        return c;
      },
      "random-" + std::to_string(seed));
}

// ---------------------------------------------------------------------------

/// Canonical form of the rooted tree: the recursive sorted-children code.
/// Two trees share a code iff they are isomorphic as rooted (hence
/// level-graded) trees.
inline std::string canonical_code(const TruncatedTree& t) {
  std::vector<std::string> code(t.size());
  for (std::size_t k = t.depth() + 1; k-- > 0;) {
    for (NodeIndex x : t.level_nodes(k)) {
      std::vector<const std::string*> kids;
      for (NodeIndex c : t.children(x)) kids.push_back(&code[c]);
      std::sort(kids.begin(), kids.end(), [](auto* a, auto* b) { return *a < *b; });
      std::string s = "(";
      for (auto* kc : kids) s += *kc;
      s += ")";
      code[x] = std::move(s);
    }
  }
  return code[t.root()];
}

/// Graphviz rendering: one edge parent -> child, nodes ranked by level.
inline std::string to_dot(const TruncatedTree& t) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "digraph " + quote(t.name().empty() ? "tree" : t.name()) + " {\n";
  for (std::size_t k = 0; k <= t.depth(); ++k) {
    out += "  { rank=same;";
    for (NodeIndex x : t.level_nodes(k)) out += " " + quote(t.id(x)) + ";";
    out += " }\n";
  }
  for (NodeIndex x = 0; x < t.size(); ++x)
    if (t.parent(x) != no_node) out += "  " + quote(t.id(t.parent(x))) + " -> " + quote(t.id(x)) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace omt
