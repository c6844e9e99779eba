#pragma once

// Local embeddability, local isomorphism and bounded-rank
// Ehrenfeucht-Fraisse equivalence between truncated trees.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"

namespace omt {

/// Injective, root-preserving, parent-preserving map between truncations,
/// keyed by source node id.
struct Embedding {
  std::map<std::string, std::string> image;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

namespace detail {

inline void check_common_depth(const TruncatedTree& a, const TruncatedTree& b, std::size_t n) {
  if (n > a.depth() || n > b.depth())
    throw invalid_input("level " + std::to_string(n) + " exceeds the depth of one of the trees (" +
                        std::to_string(a.depth()) + ", " + std::to_string(b.depth()) + ")");
}

// Decides embeddability of subtrees by recursive child matching, subject to a
// set of forced source -> target assignments.
class EmbeddingSearch {
public:
  EmbeddingSearch(const TruncatedTree& src, const TruncatedTree& dst)
      : src_(src), dst_(dst), forced_(src.size(), no_node), owner_(dst.size(), no_node) {}

  bool feasible() {
    memo_.assign(src_.size() * dst_.size(), -1);
    return can(src_.root(), dst_.root());
  }

  bool force(NodeIndex u, NodeIndex v) {
    if (owner_[v] != no_node) return false;
    forced_[u] = v;
    owner_[v] = u;
    if (feasible()) return true;
    forced_[u] = no_node;
    owner_[v] = no_node;
    return false;
  }

  NodeIndex forced(NodeIndex u) const { return forced_[u]; }

private:
  bool allowed(NodeIndex u, NodeIndex v) const {
    if (forced_[u] != no_node && forced_[u] != v) return false;
    if (owner_[v] != no_node && owner_[v] != u) return false;
    return true;
  }

  bool can(NodeIndex u, NodeIndex v) {
    auto& slot = memo_[u * dst_.size() + v];
    if (slot >= 0) return slot;
    bool ok = allowed(u, v) && match_children(u, v);
    slot = ok;
    return ok;
  }

  // Kuhn's augmenting paths: every child of u needs a distinct child of v.
  bool match_children(NodeIndex u, NodeIndex v) {
    auto cu = src_.children(u);
    auto cv = dst_.children(v);
    if (cu.size() > cv.size()) return false;
    std::vector<std::vector<bool>> edge(cu.size(), std::vector<bool>(cv.size()));
    for (std::size_t i = 0; i < cu.size(); ++i)
      for (std::size_t j = 0; j < cv.size(); ++j) edge[i][j] = can(cu[i], cv[j]);
    std::vector<std::size_t> match_of(cv.size(), no_node);
    for (std::size_t i = 0; i < cu.size(); ++i) {
      std::vector<bool> seen(cv.size(), false);
      auto augment = [&](auto&& self, std::size_t a) -> bool {
        for (std::size_t j = 0; j < cv.size(); ++j) {
          if (!edge[a][j] || seen[j]) continue;
          seen[j] = true;
          if (match_of[j] == no_node || self(self, match_of[j])) {
            match_of[j] = a;
            return true;
          }
        }
        return false;
      };
      if (!augment(augment, i)) return false;
    }
    return true;
  }

  const TruncatedTree& src_;
  const TruncatedTree& dst_;
  std::vector<NodeIndex> forced_;
  std::vector<NodeIndex> owner_;
  std::vector<std::int8_t> memo_;
};

inline std::vector<NodeIndex> sorted_by_id(const TruncatedTree& t, std::span<const NodeIndex> nodes) {
  std::vector<NodeIndex> out(nodes.begin(), nodes.end());
  std::sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) { return t.id(a) < t.id(b); });
  return out;
}

inline std::vector<NodeIndex> all_by_id(const TruncatedTree& t) {
  std::vector<NodeIndex> all(t.size());
  for (NodeIndex x = 0; x < t.size(); ++x) all[x] = x;
  return sorted_by_id(t, all);
}

}  // namespace detail

/// Embedding of the first n levels of t1 into the first n levels of t2, if
/// any.  Existence is decided by recursive bipartite matching of children; the
/// returned embedding is the lexicographically least one when source nodes are
/// taken in id order and targets compared by id.
inline std::optional<Embedding> local_embeddable(const TruncatedTree& t1, const TruncatedTree& t2, std::size_t n) {
  detail::check_common_depth(t1, t2, n);
  TruncatedTree a = truncate(t1, n);
  TruncatedTree b = truncate(t2, n);
  detail::EmbeddingSearch search(a, b);
  if (!search.feasible()) return std::nullopt;

  Embedding e;
  for (NodeIndex u : detail::all_by_id(a)) {
    bool placed = false;
    for (NodeIndex v : detail::sorted_by_id(b, b.level_nodes(a.level(u))))
      if (search.force(u, v)) {
        placed = true;
        break;
      }
    if (!placed) throw std::logic_error("local_embeddable: feasible search could not be completed");
    e.image.emplace(a.id(u), b.id(search.forced(u)));
  }
  return e;
}

/// Number of embeddings of the first k levels of t1 into those of t2, for
/// k = 0..n.  Exponential; meant for inspecting small instances.
inline std::vector<std::uint64_t> count_level_embeddings(const TruncatedTree& t1, const TruncatedTree& t2,
                                                         std::size_t n) {
  detail::check_common_depth(t1, t2, n);
  auto mul = [](std::uint64_t x, std::uint64_t y) {
    if (y != 0 && x > UINT64_MAX / y) throw resource_error("embedding count exceeds 64 bits");
    return x * y;
  };
  std::vector<std::uint64_t> counts;
  for (std::size_t k = 0; k <= n; ++k) {
    // ways(u, v): embeddings of u's subtree (cut at level k) into v's.
    auto ways = [&](auto&& self, NodeIndex u, NodeIndex v) -> std::uint64_t {
      if (t1.level(u) == k) return 1;
      auto cu = t1.children(u);
      auto cv = t2.children(v);
      std::vector<bool> used(cv.size(), false);
      auto assign = [&](auto&& rec, std::size_t i) -> std::uint64_t {
        if (i == cu.size()) return 1;
        std::uint64_t total = 0;
        for (std::size_t j = 0; j < cv.size(); ++j) {
          if (used[j]) continue;
          std::uint64_t w = self(self, cu[i], cv[j]);
          if (w == 0) continue;
          used[j] = true;
          std::uint64_t rest = rec(rec, i + 1);
          used[j] = false;
          total += mul(w, rest);
        }
        return total;
      };
      return assign(assign, 0);
    };
    counts.push_back(ways(ways, t1.root(), t2.root()));
  }
  return counts;
}

/// Canonical codes of the two n-level truncations agree.
inline bool locally_isomorphic(const TruncatedTree& t1, const TruncatedTree& t2, std::size_t n) {
  detail::check_common_depth(t1, t2, n);
  return canonical_code(truncate(t1, n)) == canonical_code(truncate(t2, n));
}

// ---------------------------------------------------------------------------
// Ehrenfeucht-Fraisse games on the strict ancestor order.

struct EfMove {
  std::size_t round = 0;  // 1-based
  int side = 1;           // structure the spoiler picks in (1 or 2)
  std::string spoiler;
  std::optional<std::string> duplicator;  // absent: every reply breaks the partial isomorphism

  friend bool operator==(const EfMove&, const EfMove&) = default;
};

struct GameResult {
  bool equivalent = true;
  std::size_t rank = 0;
  std::vector<EfMove> witness;  // spoiler line, empty when equivalent
};

struct EfBudget {
  std::size_t max_rank = 8;
  std::size_t max_states = 4'000'000;
};

namespace detail {

class EfSolver {
public:
  using Pair = std::pair<NodeIndex, NodeIndex>;
  using Position = std::vector<Pair>;  // sorted

  EfSolver(const TruncatedTree& a, const TruncatedTree& b, EfBudget budget)
      : a_(a), b_(b), budget_(budget), order_a_(all_by_id(a)), order_b_(all_by_id(b)) {}

  // Adding (p, q) keeps the picks a partial isomorphism of the strict orders.
  bool consistent(const Position& pos, NodeIndex p, NodeIndex q) const {
    for (auto [x, y] : pos) {
      if ((p == x) != (q == y)) return false;
      if (a_.is_strictly_below(p, x) != b_.is_strictly_below(q, y)) return false;
      if (a_.is_strictly_below(x, p) != b_.is_strictly_below(y, q)) return false;
    }
    return true;
  }

  static Position extend(Position pos, Pair pr) {
    auto it = std::lower_bound(pos.begin(), pos.end(), pr);
    if (it == pos.end() || *it != pr) pos.insert(it, pr);
    return pos;
  }

  // Duplicator survives `rounds` more rounds from `pos`.
  bool wins(std::size_t rounds, const Position& pos) {
    if (rounds == 0) return true;
    std::string key = encode(rounds, pos);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= budget_.max_states)
      throw resource_error("EF game search exceeds the state budget of " + std::to_string(budget_.max_states));

    bool result = true;
    for (int side = 1; side <= 2 && result; ++side) {
      const auto& picks = side == 1 ? order_a_ : order_b_;
      for (NodeIndex e : picks) {
        if (already_picked(pos, side, e)) continue;  // duplicator copies; never helps the spoiler
        if (!has_reply(rounds, pos, side, e)) {
          result = false;
          break;
        }
      }
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  std::vector<Pair> replies(const Position& pos, int side, NodeIndex e) const {
    std::vector<Pair> out;
    const auto& candidates = side == 1 ? order_b_ : order_a_;
    for (NodeIndex r : candidates) {
      Pair pr = side == 1 ? Pair{e, r} : Pair{r, e};
      if (consistent(pos, pr.first, pr.second)) out.push_back(pr);
    }
    return out;
  }

  bool has_reply(std::size_t rounds, const Position& pos, int side, NodeIndex e) {
    for (const Pair& pr : replies(pos, side, e))
      if (wins(rounds - 1, extend(pos, pr))) return true;
    return false;
  }

  static bool already_picked(const Position& pos, int side, NodeIndex e) {
    for (auto [x, y] : pos)
      if ((side == 1 ? x : y) == e) return true;
    return false;
  }

  const TruncatedTree& a() const { return a_; }
  const TruncatedTree& b() const { return b_; }
  const std::vector<NodeIndex>& order(int side) const { return side == 1 ? order_a_ : order_b_; }

private:
  static std::string encode(std::size_t rounds, const Position& pos) {
    std::string key = std::to_string(rounds);
    for (auto [x, y] : pos) key += "|" + std::to_string(x) + "," + std::to_string(y);
    return key;
  }

  const TruncatedTree& a_;
  const TruncatedTree& b_;
  EfBudget budget_;
  std::vector<NodeIndex> order_a_;
  std::vector<NodeIndex> order_b_;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace detail

/// Decides the rank-round EF game on the two trees as strict partial orders.
/// Picks may repeat; the duplicator loses as soon as the picked pairs stop
/// being a partial isomorphism.  When the spoiler wins, `witness` is a line of
/// play: spoiler moves are the first winning ones in (side, id) order, and the
/// duplicator's replies are the ones surviving longest, so for the least
/// distinguishing rank the line has exactly `rank` moves.
inline GameResult ef_equivalent(const TruncatedTree& t1, const TruncatedTree& t2, std::size_t rank,
                                EfBudget budget = {}) {
  if (rank > budget.max_rank)
    throw resource_error("EF rank " + std::to_string(rank) + " exceeds the rank budget of " +
                         std::to_string(budget.max_rank));
  detail::EfSolver solver(t1, t2, budget);
  GameResult result;
  result.rank = rank;
  result.equivalent = solver.wins(rank, {});
  if (result.equivalent) return result;

  detail::EfSolver::Position pos;
  for (std::size_t left = rank, round = 1; left > 0; --left, ++round) {
    std::optional<std::pair<int, NodeIndex>> move;
    for (int side = 1; side <= 2 && !move; ++side)
      for (NodeIndex e : solver.order(side)) {
        if (detail::EfSolver::already_picked(pos, side, e)) continue;
        if (!solver.has_reply(left, pos, side, e)) {
          move = {side, e};
          break;
        }
      }
    if (!move) throw std::logic_error("ef_equivalent: losing position without a winning spoiler move");
    auto [side, e] = *move;
    EfMove m{round, side, (side == 1 ? t1 : t2).id(e), std::nullopt};

    auto replies = solver.replies(pos, side, e);
    if (replies.empty()) {
      result.witness.push_back(std::move(m));
      break;
    }
    // Longest survival: largest s < left with wins(s, next).
    std::optional<std::pair<std::size_t, detail::EfSolver::Position>> best;
    for (const auto& pr : replies) {
      auto next = detail::EfSolver::extend(pos, pr);
      std::size_t s = 0;
      while (s + 1 < left && solver.wins(s + 1, next)) ++s;
      if (!best || s > best->first) {
        best = {s, next};
        m.duplicator = side == 1 ? t2.id(pr.second) : t1.id(pr.first);
      }
    }
    result.witness.push_back(std::move(m));
    pos = std::move(best->second);
  }
  return result;
}

/// Replays a spoiler line: every intermediate pick keeps a partial
/// isomorphism, and the final spoiler pick admits no consistent reply, within
/// the stated rank.
inline bool witness_replays(const TruncatedTree& t1, const TruncatedTree& t2, const GameResult& g) {
  if (g.equivalent) return g.witness.empty();
  if (g.witness.empty() || g.witness.size() > g.rank) return false;
  detail::EfSolver solver(t1, t2, {});
  detail::EfSolver::Position pos;
  for (std::size_t i = 0; i < g.witness.size(); ++i) {
    const auto& m = g.witness[i];
    if (m.round != i + 1 || (m.side != 1 && m.side != 2)) return false;
    const TruncatedTree& picked_in = m.side == 1 ? t1 : t2;
    const TruncatedTree& reply_in = m.side == 1 ? t2 : t1;
    auto e = picked_in.find(m.spoiler);
    if (!e) return false;
    bool last = i + 1 == g.witness.size();
    if (last) return !m.duplicator && solver.replies(pos, m.side, *e).empty();
    if (!m.duplicator) return false;
    auto r = reply_in.find(*m.duplicator);
    if (!r) return false;
    NodeIndex p = m.side == 1 ? *e : *r;
    NodeIndex q = m.side == 1 ? *r : *e;
    if (!solver.consistent(pos, p, q)) return false;
    pos = detail::EfSolver::extend(pos, {p, q});
  }
  return false;
}

/// Least rank <= max_rank at which the trees are EF-inequivalent (binary search,
/// using monotonicity in the rank).
inline std::optional<std::size_t> distinguishing_rank(const TruncatedTree& t1, const TruncatedTree& t2,
                                                      std::size_t max_rank, EfBudget budget = {}) {
  if (max_rank == 0 || ef_equivalent(t1, t2, max_rank, budget).equivalent) return std::nullopt;
  std::size_t lo = 0, hi = max_rank;  // equivalent at lo, inequivalent at hi
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (ef_equivalent(t1, t2, mid, budget).equivalent)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace omt
