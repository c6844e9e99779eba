#pragma once

// Permutation actions on finite point sets: orbits, pointwise stabilizers
// (via a Schreier-Sims stabilizer chain), definable closure, and the iterated
// wreath product acting on a level-uniform tree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "omegatree/error.hpp"
#include "omegatree/meet_trees.hpp"
#include "omegatree/tree.hpp"

namespace omt {

using Point = std::uint32_t;
using Perm = std::vector<Point>;  // p[x] is the image of x; products act left to right
using PointSet = std::vector<Point>;  // sorted ascending
using GroupOrder = unsigned __int128;

namespace perm {

inline Perm identity(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), Point{0});
  return p;
}

inline bool is_identity(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

// Apply a, then b.
inline Perm compose(const Perm& a, const Perm& b) {
  Perm out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = b[a[i]];
  return out;
}

inline Perm inverse(const Perm& p) {
  Perm out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<Point>(i);
  return out;
}

inline bool is_bijection(const Perm& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (Point x : p) {
    if (x >= n || hit[x]) return false;
    hit[x] = true;
  }
  return true;
}

inline Perm cycle(std::size_t n) {
  Perm p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Point>((i + 1) % n);
  return p;
}

inline Perm transposition(std::size_t n, Point a, Point b) {
  Perm p = identity(n);
  std::swap(p[a], p[b]);
  return p;
}

}  // namespace perm

inline std::string order_to_string(GroupOrder v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

class PermAction {
public:
  static PermAction make(std::vector<std::string> points, std::vector<Perm> generators) {
    PermAction a;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (!a.index_.emplace(points[i], static_cast<Point>(i)).second)
        throw invalid_input("duplicate point \"" + points[i] + "\"");
    for (std::size_t g = 0; g < generators.size(); ++g)
      if (!perm::is_bijection(generators[g], points.size()))
        throw invalid_input("generator " + std::to_string(g) + " is not a bijection of the " +
                            std::to_string(points.size()) + " points");
    a.points_ = std::move(points);
    a.generators_ = std::move(generators);
    return a;
  }

  std::size_t degree() const noexcept { return points_.size(); }
  const std::vector<std::string>& points() const noexcept { return points_; }
  const std::vector<Perm>& generators() const noexcept { return generators_; }
  const std::string& point(Point x) const { return points_.at(x); }

  Point index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw invalid_input("unknown point \"" + id + "\"");
    return it->second;
  }

private:
  std::vector<std::string> points_;
  std::vector<Perm> generators_;
  std::unordered_map<std::string, Point> index_;
};

/// Pairs of socks: points u<n>0, u<n>1 for each pair n, one transposition per pair.
inline PermAction socks_action(std::size_t pairs) {
  std::vector<std::string> points;
  for (std::size_t n = 0; n < pairs; ++n)
    for (int i = 0; i < 2; ++i) points.push_back("u" + std::to_string(n) + std::to_string(i));
  std::vector<Perm> gens;
  for (std::size_t n = 0; n < pairs; ++n)
    gens.push_back(perm::transposition(2 * pairs, static_cast<Point>(2 * n), static_cast<Point>(2 * n + 1)));
  return PermAction::make(std::move(points), std::move(gens));
}

namespace detail {
inline std::vector<std::string> numbered_points(std::size_t n) {
  std::vector<std::string> points;
  for (std::size_t i = 0; i < n; ++i) points.push_back("p" + std::to_string(i));
  return points;
}
}  // namespace detail

/// Generators of the full symmetric group on n points: (0 1) and the n-cycle.
inline std::vector<Perm> symmetric_generators(std::size_t n) {
  if (n < 2) return {};
  std::vector<Perm> gens{perm::transposition(n, 0, 1)};
  if (n > 2) gens.push_back(perm::cycle(n));
  return gens;
}

inline std::vector<Perm> cyclic_generators(std::size_t n) {
  if (n < 2) return {};
  return {perm::cycle(n)};
}

inline PermAction symmetric_action(std::size_t n) {
  return PermAction::make(detail::numbered_points(n), symmetric_generators(n));
}

inline PermAction cyclic_action(std::size_t n) { return PermAction::make(detail::numbered_points(n), cyclic_generators(n)); }

/// Orbits, each sorted, listed by least point.
inline std::vector<PointSet> orbits(const PermAction& a) {
  std::vector<bool> seen(a.degree(), false);
  std::vector<PointSet> out;
  for (Point start = 0; start < a.degree(); ++start) {
    if (seen[start]) continue;
    PointSet orbit{start};
    seen[start] = true;
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (const auto& g : a.generators())
        if (!seen[g[orbit[i]]]) {
          seen[g[orbit[i]]] = true;
          orbit.push_back(g[orbit[i]]);
        }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

inline bool is_transitive(const PermAction& a) { return a.degree() == 0 || orbits(a).size() == 1; }

struct GroupBudget {
  unsigned max_order_bits = 120;
};

/// Base and strong generating set built by deterministic Schreier-Sims.  The
/// base starts with a caller-given prefix, so the pointwise stabilizer of that
/// prefix is generated by the strong generators fixing it.  When the group
/// order is known in advance the construction stops as soon as the basic
/// orbits account for it.
class StabilizerChain {
public:
  StabilizerChain(std::size_t degree, const std::vector<Perm>& generators, std::vector<Point> base_prefix = {},
                  std::optional<GroupOrder> known_order = std::nullopt, GroupBudget budget = {})
      : degree_(degree), base_(std::move(base_prefix)), budget_(budget) {
    for (Point b : base_)
      if (b >= degree_) throw invalid_input("base point out of range");
    for (const auto& g : generators) {
      if (!perm::is_bijection(g, degree_)) throw invalid_input("generator is not a bijection");
      if (!perm::is_identity(g) && std::find(strong_.begin(), strong_.end(), g) == strong_.end())
        strong_.push_back(g);
    }
    for (const auto& g : strong_) ensure_moves_base(g);
    levels_.resize(base_.size());
    for (std::size_t i = 0; i < base_.size(); ++i) rebuild_level(i);
    schreier_sims(known_order);
  }

  GroupOrder order() const {
    GroupOrder o = 1;
    for (const auto& l : levels_) o *= l.orbit.size();
    return o;
  }

  const std::vector<Point>& base() const noexcept { return base_; }
  const std::vector<Perm>& strong_generators() const noexcept { return strong_; }

  /// Generators of the pointwise stabilizer of base[0..k).
  std::vector<Perm> stabilizer_generators(std::size_t k) const {
    std::vector<Perm> out;
    for (const auto& g : strong_)
      if (fixes_prefix(g, k)) out.push_back(g);
    return out;
  }

  bool contains(Perm g) const {
    auto [h, j] = strip(std::move(g), 0);
    return j == levels_.size() && perm::is_identity(h);
  }

private:
  struct Level {
    std::vector<std::size_t> gens;             // indices into strong_
    std::vector<Point> orbit;                  // basic orbit, discovery order
    std::vector<std::optional<Perm>> transversal;  // u[beta]: base point -> beta
  };

  bool fixes_prefix(const Perm& g, std::size_t k) const {
    for (std::size_t i = 0; i < k; ++i)
      if (g[base_[i]] != base_[i]) return false;
    return true;
  }

  void ensure_moves_base(const Perm& g) {
    if (!fixes_prefix(g, base_.size())) return;
    for (Point x = 0; x < degree_; ++x)
      if (g[x] != x) {
        base_.push_back(x);
        return;
      }
  }

  void rebuild_level(std::size_t i) {
    Level& l = levels_[i];
    l.gens.clear();
    for (std::size_t s = 0; s < strong_.size(); ++s)
      if (fixes_prefix(strong_[s], i)) l.gens.push_back(s);
    l.orbit.assign(1, base_[i]);
    l.transversal.assign(degree_, std::nullopt);
    l.transversal[base_[i]] = perm::identity(degree_);
    for (std::size_t j = 0; j < l.orbit.size(); ++j) {
      Point gamma = l.orbit[j];
      for (std::size_t s : l.gens) {
        Point delta = strong_[s][gamma];
        if (l.transversal[delta]) continue;
        l.transversal[delta] = perm::compose(*l.transversal[gamma], strong_[s]);
        l.orbit.push_back(delta);
      }
    }
    check_budget();
  }

  void check_budget() const {
    // log2 of the order stays below the budget; checked before multiplying.
    double bits = 0;
    for (const auto& l : levels_)
      if (!l.orbit.empty()) bits += std::log2(static_cast<double>(l.orbit.size()));
    if (bits > budget_.max_order_bits)
      throw resource_error("group order exceeds the budget of 2^" + std::to_string(budget_.max_order_bits));
  }

  // Sifts g through levels from..end.  Returns the residue and the level where
  // sifting stopped (levels_.size() when it went through).
  std::pair<Perm, std::size_t> strip(Perm g, std::size_t from) const {
    for (std::size_t i = from; i < levels_.size(); ++i) {
      Point beta = g[base_[i]];
      const auto& u = levels_[i].transversal[beta];
      if (!u) return {std::move(g), i};
      g = perm::compose(g, perm::inverse(*u));
    }
    return {std::move(g), levels_.size()};
  }

  void schreier_sims(std::optional<GroupOrder> known_order) {
    auto done = [&] { return known_order && order() == *known_order; };
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(levels_.size()) - 1;
    while (i >= 0) {
      if (done()) return;
      bool restarted = false;
      const std::size_t li = static_cast<std::size_t>(i);
      for (std::size_t oi = 0; oi < levels_[li].orbit.size() && !restarted; ++oi) {
        Point beta = levels_[li].orbit[oi];
        for (std::size_t s : levels_[li].gens) {
          const Perm& gen = strong_[s];
          Perm g = perm::compose(perm::compose(*levels_[li].transversal[beta], gen),
                                 perm::inverse(*levels_[li].transversal[gen[beta]]));
          if (perm::is_identity(g)) continue;
          auto [h, j] = strip(std::move(g), li + 1);
          if (j == levels_.size() && perm::is_identity(h)) continue;
          if (j == levels_.size()) {
            ensure_moves_base(h);
            levels_.emplace_back();
          }
          strong_.push_back(std::move(h));
          for (std::size_t l = li + 1; l <= j; ++l) rebuild_level(l);
          i = static_cast<std::ptrdiff_t>(j);
          restarted = true;
          break;
        }
      }
      if (!restarted) --i;
    }
  }

  std::size_t degree_;
  std::vector<Point> base_;
  GroupBudget budget_;
  std::vector<Perm> strong_;
  std::vector<Level> levels_;
};

/// Definable closure for one action: dcl(A) is the set of points fixed by the
/// pointwise stabilizer of A.  The group order is computed once; each query
/// then builds a chain with base prefix A from the strong generators.
class DclOracle {
public:
  explicit DclOracle(const PermAction& action, GroupBudget budget = {})
      : degree_(action.degree()), budget_(budget), full_(action.degree(), action.generators(), {}, std::nullopt, budget) {}

  GroupOrder group_order() const { return full_.order(); }

  PointSet operator()(PointSet a) const {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    for (Point x : a)
      if (x >= degree_) throw invalid_input("point out of range");
    StabilizerChain chain(degree_, full_.strong_generators(), a, full_.order(), budget_);
    auto stab = chain.stabilizer_generators(a.size());
    PointSet out;
    for (Point x = 0; x < degree_; ++x)
      if (std::all_of(stab.begin(), stab.end(), [x](const Perm& g) { return g[x] == x; })) out.push_back(x);
    return out;
  }

private:
  std::size_t degree_;
  GroupBudget budget_;
  StabilizerChain full_;
};

inline PointSet pointwise_stabilizer_fixed_points(const PermAction& action, PointSet a, GroupBudget budget = {}) {
  return DclOracle(action, budget)(std::move(a));
}

// ---------------------------------------------------------------------------

struct ProbeRow {
  std::size_t subset_size = 0;
  std::size_t subsets_checked = 0;
  bool sampled = false;
  std::size_t max_dcl = 0;
};

struct ProbeReport {
  std::size_t max_a = 0;
  std::size_t threshold = 0;
  std::vector<ProbeRow> rows;
  std::size_t max_dcl = 0;
  std::vector<PointSet> exceeding;  // subsets whose closure is larger than the threshold
};

/// Sizes of dcl(A) over all A with |A| <= max_a, or over a seeded sample of
/// `subset_budget` subsets for each size whose count exceeds that budget.  On
/// a finite action every closure is finite; the numbers are a diagnostic of
/// how closures grow, not a verdict about local finiteness.
inline ProbeReport dcl_is_locally_finite_probe(const PermAction& action, std::size_t max_a, std::size_t threshold,
                                               std::uint64_t seed = 0, std::size_t subset_budget = 20'000,
                                               GroupBudget budget = {}) {
  DclOracle dcl(action, budget);
  const std::size_t n = action.degree();
  ProbeReport report{max_a, threshold, {}, 0, {}};
  std::mt19937_64 rng(seed);

  auto record = [&](ProbeRow& row, const PointSet& a) {
    std::size_t size = dcl(a).size();
    ++row.subsets_checked;
    row.max_dcl = std::max(row.max_dcl, size);
    report.max_dcl = std::max(report.max_dcl, size);
    if (size > threshold) report.exceeding.push_back(a);
  };

  for (std::size_t k = 0; k <= std::min(max_a, n); ++k) {
    ProbeRow row{k, 0, false, 0};
    // C(n, k), saturating at the budget.
    std::size_t count = 1;
    for (std::size_t i = 0; i < k && count <= subset_budget; ++i) count = count * (n - i) / (i + 1);
    if (count <= subset_budget) {
      std::vector<Point> a(k);
      std::iota(a.begin(), a.end(), Point{0});
      for (;;) {
        record(row, a);
        std::size_t i = k;
        while (i > 0 && a[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++a[i - 1];
        for (std::size_t j = i; j < k; ++j) a[j] = a[j - 1] + 1;
      }
    } else {
      row.sampled = true;
      for (std::size_t s = 0; s < subset_budget; ++s) {
        std::set<Point> pick;
        while (pick.size() < k) pick.insert(static_cast<Point>(rng() % n));
        record(row, PointSet(pick.begin(), pick.end()));
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Iterated wreath products.

struct LevelGroup {
  enum class Kind { symmetric, cyclic, explicit_generators };
  Kind kind = Kind::symmetric;
  std::vector<Perm> generators;  // only for explicit_generators
};

struct WreathLevel {
  std::size_t size = 2;
  LevelGroup group;
};

struct WreathSpec {
  std::vector<WreathLevel> levels;  // X_0 .. X_{D-1}

  std::size_t depth() const noexcept { return levels.size(); }
};

inline std::vector<Perm> level_generators(const WreathLevel& l) {
  switch (l.group.kind) {
    case LevelGroup::Kind::symmetric: return symmetric_generators(l.size);
    case LevelGroup::Kind::cyclic: return cyclic_generators(l.size);
    case LevelGroup::Kind::explicit_generators: return l.group.generators;
  }
  return {};
}

inline PermAction level_action(const WreathLevel& l) {
  return PermAction::make(detail::numbered_points(l.size), level_generators(l));
}

inline void validate(const WreathSpec& spec) {
  if (spec.levels.empty()) throw invalid_input("wreath spec needs at least one level");
  for (std::size_t n = 0; n < spec.levels.size(); ++n) {
    const auto& l = spec.levels[n];
    if (l.size < 2) throw invalid_input("wreath level " + std::to_string(n) + " has size < 2");
    PermAction a = level_action(l);  // checks bijections
    if (!is_transitive(a)) throw invalid_input("wreath level " + std::to_string(n) + " group is not transitive");
  }
}

struct WreathAction {
  TruncatedTree tree;
  PermAction action;  // points are the tree's node ids, in tree order
};

/// Tree of all sequences (x_0, ..., x_{n-1}) with x_i in X_i and n <= D, with
/// id "0" for the empty sequence and "0.x_0.....x_{n-1}" otherwise.  For every
/// level n, node s on level n and generator g of G_n there is one generator
/// acting as g on entry n of the sequences extending s, fixing everything
/// else.
inline WreathAction wreath_tree(const WreathSpec& spec, std::size_t node_budget = 100'000) {
  validate(spec);
  const std::size_t depth = spec.depth();
  std::vector<std::size_t> width{1}, offset{0};
  std::size_t total = 1;
  for (std::size_t n = 0; n < depth; ++n) {
    if (width.back() > node_budget / spec.levels[n].size) throw resource_error("wreath tree exceeds node budget");
    width.push_back(width.back() * spec.levels[n].size);
    offset.push_back(total);
    total += width.back();
    if (total > node_budget) throw resource_error("wreath tree exceeds node budget");
  }

  // Nodes in level order; within a level, sequences in lexicographic order.
  std::vector<std::vector<Point>> seq(total);
  std::vector<std::string> ids(total);
  std::vector<NodeRecord> records;
  ids[0] = "0";
  records.push_back({"0", std::nullopt});
  for (std::size_t n = 0; n < depth; ++n)
    for (std::size_t p = 0; p < width[n]; ++p) {
      std::size_t parent = offset[n] + p;
      for (std::size_t x = 0; x < spec.levels[n].size; ++x) {
        std::size_t child = offset[n + 1] + p * spec.levels[n].size + x;
        seq[child] = seq[parent];
        seq[child].push_back(static_cast<Point>(x));
        ids[child] = ids[parent] + "." + std::to_string(x);
        records.push_back({ids[child], ids[parent]});
      }
    }
  auto index_of = [&](const std::vector<Point>& s) {
    std::size_t v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) v = v * spec.levels[i].size + s[i];
    return offset[s.size()] + v;
  };

  std::vector<Perm> gens;
  for (std::size_t n = 0; n < depth; ++n) {
    auto level_gens = level_generators(spec.levels[n]);
    for (std::size_t p = 0; p < width[n]; ++p) {
      std::size_t anchor = offset[n] + p;
      for (const auto& g : level_gens) {
        Perm full = perm::identity(total);
        for (std::size_t v = offset[n + 1]; v < total; ++v) {
          if (!std::equal(seq[anchor].begin(), seq[anchor].end(), seq[v].begin())) continue;
          auto moved = seq[v];
          moved[n] = g[moved[n]];
          full[v] = static_cast<Point>(index_of(moved));
        }
        gens.push_back(std::move(full));
      }
    }
  }
  auto tree = TruncatedTree::from_records(std::move(records), depth, "wreath");
  return {std::move(tree), PermAction::make(std::move(ids), std::move(gens))};
}

/// dcl(A) for the wreath action, assembled level by level: close A downwards
/// (the root is always in the closure),
/// then at every node x of the closure add dcl_{G_n}(B & succ(x)) computed in
/// the copy of X_n formed by the children of x, where B is the closure so far;
/// repeat until nothing changes.  Children of a node are matched to X_n by
/// position.
inline NodeSet dcl_wreath_formula(const TruncatedTree& tree, const WreathSpec& spec, const NodeSet& a,
                                  GroupBudget budget = {}) {
  validate(spec);
  if (tree.depth() != spec.depth()) throw invalid_input("tree depth does not match the wreath spec");
  for (std::size_t n = 0; n < spec.depth(); ++n)
    for (NodeIndex x : tree.level_nodes(n))
      if (tree.degree(x) != spec.levels[n].size)
        throw invalid_input("node \"" + tree.id(x) + "\" does not have " + std::to_string(spec.levels[n].size) +
                            " children");

  std::vector<DclOracle> level_dcl;
  for (const auto& l : spec.levels) level_dcl.emplace_back(level_action(l), budget);

  std::vector<bool> in(tree.size(), false);
  in[tree.root()] = true;
  for (NodeIndex x : a) {
    if (x >= tree.size()) throw invalid_input("node out of range");
    for (NodeIndex y = x; y != no_node && !in[y]; y = tree.parent(y)) in[y] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeIndex x = 0; x < tree.size(); ++x) {
      if (!in[x] || tree.level(x) == tree.depth()) continue;
      auto kids = tree.children(x);
      PointSet inside;
      for (std::size_t i = 0; i < kids.size(); ++i)
        if (in[kids[i]]) inside.push_back(static_cast<Point>(i));
      for (Point i : level_dcl[tree.level(x)](inside))
        if (!in[kids[i]]) {
          in[kids[i]] = true;
          changed = true;
        }
    }
  }
  NodeSet out;
  for (NodeIndex x = 0; x < tree.size(); ++x)
    if (in[x]) out.push_back(x);
  return out;
}

}  // namespace omt
