#pragma once

// Finite meet-semilattice trees.
//
// A FiniteMeetTree is a finite rooted tree in which every node is either a
// point of T or an auxiliary point of T+ (the meet of two incomparable points
// of T).  Ramification points can be annotated "special": some of their cones
// have a least element, named explicitly.  A special point with exactly one
// such cone is exceptional.  Density of maximal chains has no finite model, so
// these annotations are inputs rather than derived facts.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"

namespace omt {

class FiniteMeetTree {
public:
  /// `in_t[x]` marks points of T; `special` lists (ramification point, least
  /// point of one of its cones) pairs by id.
  static FiniteMeetTree make(TruncatedTree tree, std::vector<bool> in_t,
                             const std::vector<std::pair<std::string, std::string>>& special) {
    if (in_t.size() != tree.size()) throw invalid_input("in_T flags do not match the node count");
    FiniteMeetTree m(std::move(tree), std::move(in_t));
    for (NodeIndex x = 0; x < m.tree_.size(); ++x)
      if (!m.in_t_[x] && m.live_cones(x) < 2)
        throw invalid_input("auxiliary node \"" + m.tree_.id(x) + "\" is not the meet of two incomparable points of T");
    for (const auto& [node_id, least_id] : special) {
      NodeIndex x = m.tree_.index_of(node_id);
      NodeIndex l = m.tree_.index_of(least_id);
      if (m.live_cones(x) < 2) throw invalid_input("special node \"" + node_id + "\" is not a ramification point");
      if (m.tree_.parent(l) != x)
        throw invalid_input("least point \"" + least_id + "\" is not a child of \"" + node_id + "\"");
      auto& flagged = m.least_[x];
      if (std::find(flagged.begin(), flagged.end(), l) != flagged.end())
        throw invalid_input("cone at \"" + node_id + "\" through \"" + least_id + "\" flagged twice");
      flagged.push_back(l);
    }
    return m;
  }

  const TruncatedTree& tree() const noexcept { return tree_; }
  bool in_t(NodeIndex x) const { return in_t_.at(x); }
  const std::vector<bool>& in_t_flags() const noexcept { return in_t_; }

  /// Least points of flagged cones at x.
  std::vector<NodeIndex> flagged_least(NodeIndex x) const {
    auto it = least_.find(x);
    return it == least_.end() ? std::vector<NodeIndex>{} : it->second;
  }
  bool is_special(NodeIndex x) const { return least_.contains(x); }
  bool is_exceptional(NodeIndex x) const {
    auto it = least_.find(x);
    return it != least_.end() && it->second.size() == 1;
  }
  const std::map<NodeIndex, std::vector<NodeIndex>>& special() const noexcept { return least_; }

  /// Children of x whose subtree contains a point of T.
  std::size_t live_cones(NodeIndex x) const {
    std::size_t n = 0;
    for (NodeIndex c : tree_.children(x)) n += has_t_above_[c];
    return n;
  }

private:
  FiniteMeetTree(TruncatedTree tree, std::vector<bool> in_t) : tree_(std::move(tree)), in_t_(std::move(in_t)) {
    has_t_above_.assign(tree_.size(), false);
    for (std::size_t k = tree_.depth() + 1; k-- > 0;)
      for (NodeIndex x : tree_.level_nodes(k)) {
        if (in_t_[x]) has_t_above_[x] = true;
        if (has_t_above_[x] && tree_.parent(x) != no_node) has_t_above_[tree_.parent(x)] = true;
      }
  }

  TruncatedTree tree_;
  std::vector<bool> in_t_;
  std::vector<bool> has_t_above_;  // subtree at x (x included) contains a point of T
  std::map<NodeIndex, std::vector<NodeIndex>> least_;
};

using NodeSet = std::vector<NodeIndex>;  // sorted ascending, no duplicates

namespace detail {
inline NodeSet normalized(NodeSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}
inline bool contains(const NodeSet& s, NodeIndex x) { return std::binary_search(s.begin(), s.end(), x); }
}  // namespace detail

/// Greatest lower bound: the lowest common ancestor.
inline NodeIndex meet(const TruncatedTree& t, NodeIndex a, NodeIndex b) {
  if (a >= t.size() || b >= t.size()) throw invalid_input("unknown node");
  while (t.level(a) > t.level(b)) a = t.parent(a);
  while (t.level(b) > t.level(a)) b = t.parent(b);
  while (a != b) {
    a = t.parent(a);
    b = t.parent(b);
  }
  return a;
}

inline NodeIndex meet(const FiniteMeetTree& m, NodeIndex a, NodeIndex b) { return meet(m.tree(), a, b); }

/// A together with all pairwise meets.  One round suffices in a tree:
/// (a ^ b) ^ c is always one of a ^ b, a ^ c, b ^ c.
inline NodeSet semilattice_closure(const FiniteMeetTree& m, NodeSet a) {
  a = detail::normalized(std::move(a));
  NodeSet out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) out.push_back(meet(m, a[i], a[j]));
  return detail::normalized(std::move(out));
}

/// Meets of two incomparable points of T.
inline NodeSet ramification_points(const FiniteMeetTree& m) {
  NodeSet out;
  for (NodeIndex x = 0; x < m.tree().size(); ++x)
    if (m.live_cones(x) >= 2) out.push_back(x);
  return out;
}

/// Cones at x: one class per child, the child's whole subtree.
inline std::vector<NodeSet> cones_at(const FiniteMeetTree& m, NodeIndex x) {
  const auto& t = m.tree();
  if (x >= t.size()) throw invalid_input("unknown node");
  std::vector<NodeSet> out;
  for (NodeIndex c : t.children(x)) {
    NodeSet cone;
    std::vector<NodeIndex> stack{c};
    while (!stack.empty()) {
      NodeIndex y = stack.back();
      stack.pop_back();
      cone.push_back(y);
      for (NodeIndex z : t.children(y)) stack.push_back(z);
    }
    out.push_back(detail::normalized(std::move(cone)));
  }
  return out;
}

inline std::size_t ramification_order(const FiniteMeetTree& m, NodeIndex x) {
  if (x >= m.tree().size()) throw invalid_input("unknown node");
  return m.tree().degree(x);
}

/// Observed code of a finite specimen.  It is a lower approximation of the
/// code of any tree the specimen is cut from: every order seen here occurs
/// there, not conversely.
struct Code {
  std::set<std::size_t> ramification_orders;  // at auxiliary ramification points
  std::set<std::size_t> point_orders;         // at ramification points of T; {1} when none ramify
  bool observed = true;

  friend bool operator==(const Code&, const Code&) = default;
};

inline Code observed_code(const FiniteMeetTree& m) {
  Code c;
  for (NodeIndex x : ramification_points(m)) {
    if (m.in_t(x))
      c.point_orders.insert(ramification_order(m, x));
    else
      c.ramification_orders.insert(ramification_order(m, x));
  }
  if (c.point_orders.empty()) c.point_orders.insert(1);
  return c;
}

enum class CodeComparison { consistent, provably_distinct };

inline CodeComparison compare_codes(const Code& a, const Code& b) {
  return a.ramification_orders == b.ramification_orders && a.point_orders == b.point_orders
             ? CodeComparison::consistent
             : CodeComparison::provably_distinct;
}

/// [A]: the meet closure of A plus the designated least point at every
/// exceptional ramification point of the closure, iterated to a fixpoint.
inline NodeSet definable_closure_semilattice(const FiniteMeetTree& m, NodeSet a) {
  NodeSet current = semilattice_closure(m, std::move(a));
  for (;;) {
    NodeSet next = current;
    for (NodeIndex x : current)
      if (m.is_exceptional(x)) next.push_back(m.flagged_least(x).front());
    next = semilattice_closure(m, std::move(next));
    if (next == current) return current;
    current = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Pieces of T relative to a finite set A, computed against [A], the meet
// closure of A.  A missing lower endpoint stands for -infinity, a virtual
// point below the whole tree.

struct UpperPiece {
  std::optional<NodeIndex> a;  // maximal element of [A]; absent when A is empty
  NodeSet nodes;               // U_a = {x in T : a < x}
};

struct BranchPiece {
  NodeIndex x = 0;  // point of T+ strictly between a and b
  NodeSet nodes;    // C_x = {y in T : b ^ y = x}
};

struct IntervalPieces {
  std::optional<NodeIndex> a;  // predecessor of b in [A]
  NodeIndex b = 0;
  NodeSet linear;                     // L_ab = {x in T : a < x < b}
  NodeSet side;                       // S_ab = {x in T : a < x, not b <= x}
  std::vector<BranchPiece> branches;  // one per point of T+ strictly between a and b
};

struct Decomposition {
  NodeSet closure;
  std::vector<UpperPiece> upper;
  std::vector<IntervalPieces> intervals;  // one per b in [A]
};

inline Decomposition relative_decomposition(const FiniteMeetTree& m, NodeSet a) {
  const auto& t = m.tree();
  for (NodeIndex x : a)
    if (x >= t.size()) throw invalid_input("unknown node");
  Decomposition d;
  d.closure = semilattice_closure(m, std::move(a));
  const NodeSet& c = d.closure;

  auto above = [&](std::optional<NodeIndex> lo, NodeIndex x) { return !lo || t.is_strictly_below(*lo, x); };

  if (c.empty()) {
    UpperPiece u{std::nullopt, {}};
    for (NodeIndex x = 0; x < t.size(); ++x)
      if (m.in_t(x)) u.nodes.push_back(x);
    d.upper.push_back(std::move(u));
    return d;
  }

  for (NodeIndex top : c) {
    bool maximal = std::none_of(c.begin(), c.end(), [&](NodeIndex o) { return t.is_strictly_below(top, o); });
    if (!maximal) continue;
    UpperPiece u{top, {}};
    for (NodeIndex x = 0; x < t.size(); ++x)
      if (m.in_t(x) && t.is_strictly_below(top, x)) u.nodes.push_back(x);
    d.upper.push_back(std::move(u));
  }

  for (NodeIndex b : c) {
    IntervalPieces iv;
    iv.b = b;
    for (NodeIndex o : c)  // elements of [A] below b form a chain; take its top
      if (t.is_strictly_below(o, b) && (!iv.a || t.level(o) > t.level(*iv.a))) iv.a = o;
    for (NodeIndex x = 0; x < t.size(); ++x) {
      if (!m.in_t(x) || !above(iv.a, x)) continue;
      if (t.is_strictly_below(x, b)) iv.linear.push_back(x);
      if (!t.is_below_or_equal(b, x)) iv.side.push_back(x);
    }
    for (NodeIndex x = t.parent(b); x != no_node && above(iv.a, x); x = t.parent(x)) {
      BranchPiece piece{x, {}};
      for (NodeIndex y = 0; y < t.size(); ++y)
        if (m.in_t(y) && meet(t, b, y) == x) piece.nodes.push_back(y);
      iv.branches.push_back(std::move(piece));
    }
    std::reverse(iv.branches.begin(), iv.branches.end());
    d.intervals.push_back(std::move(iv));
  }
  return d;
}

/// Coverage identity for a decomposition, or a description of the first
/// failure.  Every point y of T not below some element of [A] has a home
/// piece, fixed by a, the largest element of [A] below y:
///   - a maximal in [A] (or A empty): y lies in exactly one U and in no C_x;
///   - y branches off an interval (a, b) strictly above a: y lies in exactly
///     one C_x, namely x = b ^ y, and in no U;
///   - otherwise y leaves at a itself: it lies in no U and no C_x, but in
///     S_ab for every interval with lower end a.
/// In addition each C_x sits inside its S_ab and L_ab is covered by the C_x.
inline std::optional<std::string> check_decomposition(const FiniteMeetTree& m, const Decomposition& d) {
  const auto& t = m.tree();
  const NodeSet& c = d.closure;
  std::vector<std::size_t> in_upper(t.size(), 0), in_branch(t.size(), 0);
  std::vector<std::optional<NodeIndex>> branch_at(t.size());
  for (const auto& u : d.upper)
    for (NodeIndex y : u.nodes) ++in_upper[y];
  for (const auto& iv : d.intervals) {
    NodeSet covered;
    for (const auto& br : iv.branches)
      for (NodeIndex y : br.nodes) {
        ++in_branch[y];
        branch_at[y] = br.x;
        covered.push_back(y);
        if (!detail::contains(iv.side, y))
          return "C_" + t.id(br.x) + " is not inside its side piece at " + t.id(iv.b);
      }
    covered = detail::normalized(std::move(covered));
    for (NodeIndex y : iv.linear)
      if (!detail::contains(covered, y)) return "linear piece point " + t.id(y) + " is in no C_x";
  }

  for (NodeIndex y = 0; y < t.size(); ++y) {
    if (!m.in_t(y)) continue;
    if (std::any_of(c.begin(), c.end(), [&](NodeIndex o) { return t.is_below_or_equal(y, o); })) continue;
    std::optional<NodeIndex> a;
    for (NodeIndex o : c)
      if (t.is_strictly_below(o, y) && (!a || t.level(o) > t.level(*a))) a = o;
    bool a_maximal =
        c.empty() || (a && std::none_of(c.begin(), c.end(), [&](NodeIndex o) { return t.is_strictly_below(*a, o); }));
    const std::string name = t.id(y);
    if (a_maximal) {
      if (in_upper[y] != 1) return name + " lies in " + std::to_string(in_upper[y]) + " upper pieces";
      if (in_branch[y] != 0) return name + " lies in an upper piece and a branch piece";
      continue;
    }
    if (in_upper[y] != 0) return name + " lies in an upper piece below a non-maximal element";
    std::optional<NodeIndex> expected;
    for (const auto& iv : d.intervals) {
      if (iv.a != a) continue;
      NodeIndex x = meet(t, iv.b, y);
      if (!a || t.is_strictly_below(*a, x)) expected = x;
    }
    if (expected) {
      if (in_branch[y] != 1 || branch_at[y] != expected) return name + " is not in exactly its own C_x";
      continue;
    }
    if (in_branch[y] != 0) return name + " leaves at its lower endpoint but lies in a C_x";
    for (const auto& iv : d.intervals)
      if (iv.a == a && !detail::contains(iv.side, y)) return name + " is missing from a side piece";
  }
  return std::nullopt;
}

}  // namespace omt
