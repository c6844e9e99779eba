#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"

namespace omt {

/// Every node on a level below the boundary has the same number of children.
inline bool is_balanced(const TruncatedTree& t) {
  for (std::size_t k = 0; k < t.depth(); ++k) {
    auto nodes = t.level_nodes(k);
    for (NodeIndex x : nodes)
      if (t.degree(x) != t.degree(nodes.front())) return false;
  }
  return true;
}

/// No node strictly below the boundary level is childless.
inline bool is_leafless_below_boundary(const TruncatedTree& t) {
  for (std::size_t k = 0; k < t.depth(); ++k)
    for (NodeIndex x : t.level_nodes(k))
      if (t.degree(x) == 0) return false;
  return true;
}

namespace detail {

struct PruneState {
  const TruncatedTree& tree;
  std::vector<bool> alive;

  std::size_t live_degree(NodeIndex x) const {
    std::size_t d = 0;
    for (NodeIndex c : tree.children(x)) d += alive[c];
    return d;
  }

  // full[x]: x is alive and some alive path from x reaches the boundary level.
  std::vector<bool> full_height() const {
    std::vector<bool> full(tree.size(), false);
    for (std::size_t k = tree.depth() + 1; k-- > 0;)
      for (NodeIndex x : tree.level_nodes(k)) {
        if (!alive[x]) continue;
        if (k == tree.depth()) {
          full[x] = true;
          continue;
        }
        for (NodeIndex c : tree.children(x))
          if (full[c]) {
            full[x] = true;
            break;
          }
      }
    return full;
  }

  void remove_upset(NodeIndex x) {
    std::vector<NodeIndex> stack{x};
    while (!stack.empty()) {
      NodeIndex y = stack.back();
      stack.pop_back();
      if (!alive[y]) continue;
      alive[y] = false;
      for (NodeIndex c : tree.children(y)) stack.push_back(c);
    }
  }

  // Keeps only the full-height nodes of minimum degree on level k.
  bool prune_level(std::size_t k) {
    auto full = full_height();
    std::optional<std::size_t> min_degree;
    for (NodeIndex x : tree.level_nodes(k))
      if (full[x]) {
        std::size_t d = live_degree(x);
        if (!min_degree || d < *min_degree) min_degree = d;
      }
    if (!min_degree) throw std::logic_error("balance: no full-height node on a level");
    bool changed = false;
    for (NodeIndex x : tree.level_nodes(k)) {
      if (!alive[x]) continue;
      if (!full[x] || live_degree(x) != *min_degree) {
        remove_upset(x);
        changed = true;
      }
    }
    return changed;
  }
};

}  // namespace detail

/// Balanced, leafless, full-height subtree.
///
/// Repeats passes over levels 0..D-1; on each level only the nodes that reach
/// level D and, among those, have the minimum number of surviving children are
/// kept, together with everything above them.  Passes repeat until a whole
/// pass changes nothing.  Each changing pass removes at least one node, so the
/// loop terminates.  The result is one valid balanced subtree, not necessarily
/// a maximal one.
///
/// With `target_depth` the tree is first truncated to that level.
inline TruncatedTree balance(const TruncatedTree& t, std::optional<std::size_t> target_depth = std::nullopt) {
  std::size_t depth = target_depth.value_or(t.depth());
  if (depth > t.depth())
    throw invalid_input("tree does not reach depth " + std::to_string(depth) + " (height " +
                        std::to_string(t.depth()) + ")");
  TruncatedTree base = truncate(t, depth);

  detail::PruneState state{base, std::vector<bool>(base.size(), true)};
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < base.depth(); ++k) changed |= state.prune_level(k);
  }

  TruncatedTree out = induced_subtree(base, state.alive);
  if (out.depth() != depth || !is_balanced(out) || !is_leafless_below_boundary(out))
    throw std::logic_error("balance: sweep fixpoint is not a balanced full-height subtree");
  return out;
}

}  // namespace omt
