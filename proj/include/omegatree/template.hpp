#pragma once

// Templates: the ordered-partition quotient of a finitely branching tree.
//
// Each level L_k is split into blocks so that all nodes of a block have the
// same number of children in every block of level k+1.  That common number is
// the label n(X, Y).  Blocks within a level are linearly ordered, and a block
// keeps only its non-zero labels, listed in the order of the target blocks.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omegatree/balance.hpp"
#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"

namespace omt {

struct TemplateLabel {
  std::size_t target = 0;  // block index on the next level
  std::size_t count = 0;   // n(X, Y) >= 1

  friend bool operator==(const TemplateLabel&, const TemplateLabel&) = default;
};

struct TemplateBlock {
  std::string id;
  std::size_t size = 0;
  std::vector<TemplateLabel> labels;

  friend bool operator==(const TemplateBlock&, const TemplateBlock&) = default;
};

inline std::string block_id(std::size_t level, std::size_t index) {
  return std::to_string(level) + ":" + std::to_string(index);
}

struct Template {
  std::size_t depth = 0;
  std::vector<std::vector<TemplateBlock>> levels;

  const TemplateBlock& block(std::size_t level, std::size_t index) const { return levels.at(level).at(index); }

  /// Looks up a block by id on the given level.
  std::size_t block_index(std::size_t level, const std::string& id) const {
    const auto& blocks = levels.at(level);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].id == id) return i;
    throw invalid_input("no block \"" + id + "\" on template level " + std::to_string(level));
  }

  std::optional<std::size_t> label(std::size_t level, std::size_t from, std::size_t to) const {
    for (const auto& l : block(level, from).labels)
      if (l.target == to) return l.count;
    return std::nullopt;
  }

  /// Throws invalid_input naming the first violated invariant.
  void validate() const {
    if (levels.size() != depth + 1)
      throw invalid_input("template declares depth " + std::to_string(depth) + " but has " +
                          std::to_string(levels.size()) + " levels");
    if (levels[0].size() != 1 || levels[0][0].size != 1)
      throw invalid_input("template level 0 must be a single block of size 1");
    std::map<std::string, bool> ids;
    for (std::size_t k = 0; k <= depth; ++k) {
      if (levels[k].empty()) throw invalid_input("template level " + std::to_string(k) + " has no blocks");
      std::vector<std::size_t> realized(k < depth ? levels[k + 1].size() : 0, 0);
      for (const auto& b : levels[k]) {
        if (!ids.emplace(b.id, true).second) throw invalid_input("duplicate block id \"" + b.id + "\"");
        if (b.size == 0) throw invalid_input("block \"" + b.id + "\" has size 0");
        if (k == depth && !b.labels.empty())
          throw invalid_input("block \"" + b.id + "\" on the top level carries labels");
        for (std::size_t i = 0; i < b.labels.size(); ++i) {
          const auto& l = b.labels[i];
          if (l.count == 0) throw invalid_input("block \"" + b.id + "\" has a zero label");
          if (k < depth && l.target >= levels[k + 1].size())
            throw invalid_input("block \"" + b.id + "\" labels a block outside the next level");
          if (i > 0 && b.labels[i - 1].target >= l.target)
            throw invalid_input("labels of block \"" + b.id + "\" are not in block order");
          realized[l.target] += b.size * l.count;
        }
      }
      for (std::size_t j = 0; j < realized.size(); ++j) {
        const auto& y = levels[k + 1][j];
        if (realized[j] == 0) throw invalid_input("block \"" + y.id + "\" has no incoming label");
        if (realized[j] != y.size)
          throw invalid_input("size of block \"" + y.id + "\" is " + std::to_string(y.size) +
                              " but its incoming labels realize " + std::to_string(realized[j]));
      }
    }
  }

  friend bool operator==(const Template&, const Template&) = default;
};

/// A template together with the blocks as node sets of the source tree.
struct TemplatePartition {
  Template tpl;
  std::vector<std::vector<std::vector<NodeIndex>>> members;  // members[k][i]: nodes of block k:i
  std::vector<std::size_t> block_of;                         // block index of each node within its level
};

/// Stable ordered partition of every level.
///
/// Level D is one block (no information above the boundary can split it).
/// Going down, a node's signature is the vector of its child counts in the
/// ordered blocks of the next level; nodes share a block iff their signatures
/// agree, and blocks are ordered by ascending signature.  Refinement at level
/// k depends only on the final partition of level k+1, so one downward sweep
/// reaches the stable system.
inline TemplatePartition template_partition(const TruncatedTree& t) {
  const std::size_t depth = t.depth();
  TemplatePartition out;
  out.tpl.depth = depth;
  out.tpl.levels.assign(depth + 1, {});
  out.members.assign(depth + 1, {});
  out.block_of.assign(t.size(), 0);

  auto top = t.level_nodes(depth);
  out.members[depth].emplace_back(top.begin(), top.end());
  out.tpl.levels[depth].push_back({block_id(depth, 0), top.size(), {}});

  for (std::size_t k = depth; k-- > 0;) {
    const std::size_t width = out.members[k + 1].size();
    std::map<std::vector<std::size_t>, std::vector<NodeIndex>> by_signature;
    for (NodeIndex x : t.level_nodes(k)) {
      std::vector<std::size_t> sig(width, 0);
      for (NodeIndex c : t.children(x)) ++sig[out.block_of[c]];
      by_signature[std::move(sig)].push_back(x);
    }
    std::size_t index = 0;
    for (auto& [sig, nodes] : by_signature) {
      TemplateBlock b{block_id(k, index), nodes.size(), {}};
      for (std::size_t j = 0; j < sig.size(); ++j)
        if (sig[j] > 0) b.labels.push_back({j, sig[j]});
      for (NodeIndex x : nodes) out.block_of[x] = index;
      out.tpl.levels[k].push_back(std::move(b));
      out.members[k].push_back(std::move(nodes));
      ++index;
    }
  }
  return out;
}

inline Template extract_template(const TruncatedTree& t) { return template_partition(t).tpl; }

/// Canonical tree encoded by the template, built up to `depth`.  Every node in
/// block X gets, for each label (Y, n) in order, n fresh children placed in Y.
/// Ids are path based ("0", "0.0", ...), children ordered by (target block,
/// copy index).
inline TruncatedTree decode_template(const Template& tpl, std::size_t depth,
                                     std::size_t node_budget = default_node_budget) {
  tpl.validate();
  if (depth > tpl.depth)
    throw invalid_input("decode depth " + std::to_string(depth) + " exceeds template depth " +
                        std::to_string(tpl.depth));

  struct Pending {
    std::string id;
    std::size_t block;
  };
  std::vector<NodeRecord> records{{"0", std::nullopt}};
  std::vector<Pending> frontier{{"0", 0}};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<Pending> next;
    std::vector<std::size_t> realized(tpl.levels[k + 1].size(), 0);
    for (const auto& x : frontier) {
      std::size_t child = 0;
      for (const auto& l : tpl.block(k, x.block).labels)
        for (std::size_t copy = 0; copy < l.count; ++copy) {
          next.push_back({x.id + "." + std::to_string(child++), l.target});
          records.push_back({next.back().id, x.id});
          ++realized[l.target];
        }
    }
    if (records.size() > node_budget) throw resource_error("decoded tree exceeds node budget");
    for (std::size_t j = 0; j < realized.size(); ++j)
      if (realized[j] != tpl.block(k + 1, j).size)
        throw std::logic_error("decode_template: realized block size disagrees with template");
    frontier = std::move(next);
  }
  return TruncatedTree::from_records(std::move(records), depth, "decoded");
}

using BlockBranch = std::vector<std::size_t>;  // block index per level, 0..depth

/// All root-to-top block branches whose labels equal 1 on every edge leaving
/// a level >= tail_start.  Depth-first, in block order.
inline std::vector<BlockBranch> eventually_singleton_branches(const Template& tpl, std::size_t tail_start,
                                                              std::size_t branch_budget = 1'000'000) {
  tpl.validate();
  if (tail_start > tpl.depth)
    throw invalid_input("tail start " + std::to_string(tail_start) + " exceeds template depth " +
                        std::to_string(tpl.depth));
  std::vector<BlockBranch> out;
  BlockBranch path{0};
  auto walk = [&](auto&& self, std::size_t k) -> void {
    if (k == tpl.depth) {
      if (out.size() == branch_budget) throw resource_error("branch enumeration exceeds budget");
      out.push_back(path);
      return;
    }
    for (const auto& l : tpl.block(k, path.back()).labels) {
      if (k >= tail_start && l.count != 1) continue;
      path.push_back(l.target);
      self(self, k + 1);
      path.pop_back();
    }
  };
  walk(walk, 0);
  return out;
}

/// Balanced subtree of t carried by a template branch: the root, then at each
/// level the children (of nodes already taken) that lie in the branch's block.
/// The template must be the one extracted from t.
inline TruncatedTree branch_subtree(const TruncatedTree& t, const Template& tpl, const BlockBranch& branch) {
  TemplatePartition part = template_partition(t);
  if (!(part.tpl == tpl)) throw invalid_input("template was not extracted from this tree");
  if (branch.size() != tpl.depth + 1)
    throw invalid_input("branch has " + std::to_string(branch.size()) + " blocks, expected " +
                        std::to_string(tpl.depth + 1));
  if (branch[0] != 0) throw invalid_input("branch does not start at the root block");
  for (std::size_t k = 0; k < tpl.depth; ++k) {
    if (branch[k + 1] >= tpl.levels[k + 1].size()) throw invalid_input("branch names a block out of range");
    if (!tpl.label(k, branch[k], branch[k + 1]))
      throw invalid_input("branch is not a chain of template blocks: no edge " + block_id(k, branch[k]) + " -> " +
                          block_id(k + 1, branch[k + 1]));
  }

  std::vector<NodeIndex> keep{t.root()};
  std::vector<NodeIndex> frontier{t.root()};
  for (std::size_t k = 0; k < tpl.depth; ++k) {
    std::vector<NodeIndex> next;
    for (NodeIndex x : frontier)
      for (NodeIndex c : t.children(x))
        if (part.block_of[c] == branch[k + 1]) next.push_back(c);
    keep.insert(keep.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  TruncatedTree out = induced_subtree(t, keep);
  if (!is_balanced(out)) throw std::logic_error("branch_subtree: result is not balanced");
  return out;
}

/// Branch given as block ids, one per level.
inline BlockBranch branch_from_ids(const Template& tpl, const std::vector<std::string>& ids) {
  if (ids.size() != tpl.depth + 1)
    throw invalid_input("branch has " + std::to_string(ids.size()) + " blocks, expected " +
                        std::to_string(tpl.depth + 1));
  BlockBranch b;
  for (std::size_t k = 0; k < ids.size(); ++k) b.push_back(tpl.block_index(k, ids[k]));
  return b;
}

}  // namespace omt
