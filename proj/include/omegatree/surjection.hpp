#pragma once

// Non-injective surjections and leafless trees, in both directions.
//
// Given f : X -> X surjective with f(x) = f(y) for distinct x, y, let g be f
// restricted to X \ {x}.  The sets L_n = g^{-n}(x) are pairwise disjoint and
// form the levels of a tree rooted at x in which every node is the image of
// its children.  Conversely, mapping every non-root node of a tree to its
// parent and fixing the root gives a surjection that is not injective.
//
// Preimages are never computed by inverting code: built-in families carry a
// closed-form preimage oracle and table specs list preimages explicitly.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"

namespace omt {

class EndofunctionSpec {
public:
  enum class Kind { builtin, table };

  /// n -> max(n - 1, 0) on the naturals.
  static EndofunctionSpec pred() {
    EndofunctionSpec f;
    f.kind_ = Kind::builtin;
    f.family_ = "pred";
    return f;
  }

  /// n -> floor(n / k) on the naturals, k >= 2.
  static EndofunctionSpec div(std::uint64_t k) {
    if (k < 2) throw invalid_input("div family needs k >= 2");
    EndofunctionSpec f;
    f.kind_ = Kind::builtin;
    f.family_ = "div";
    f.k_ = k;
    return f;
  }

  /// Explicit finite map with explicit preimage lists.  Every value must lie in
  /// the domain, and each point p must be listed exactly once, under map[p].
  /// A missing `preimages` argument is accepted here; it is rejected when a
  /// tree is requested.
  static EndofunctionSpec table(std::map<std::string, std::string> map,
                                std::optional<std::map<std::string, std::vector<std::string>>> preimages) {
    EndofunctionSpec f;
    f.kind_ = Kind::table;
    f.family_ = "table";
    for (const auto& [p, v] : map)
      if (!map.contains(v)) throw invalid_input("table value \"" + v + "\" of \"" + p + "\" is outside the domain");
    if (preimages) {
      std::set<std::string> listed;
      for (const auto& [v, ps] : *preimages) {
        for (const auto& p : ps) {
          auto it = map.find(p);
          if (it == map.end())
            throw invalid_input("preimage \"" + p + "\" of \"" + v + "\" is outside the domain");
          if (it->second != v)
            throw invalid_input("preimage list of \"" + v + "\" contains \"" + p + "\" but the map sends it to \"" +
                                it->second + "\"");
          if (!listed.insert(p).second) throw invalid_input("point \"" + p + "\" listed as a preimage twice");
        }
      }
      for (const auto& [p, v] : map)
        if (!listed.contains(p))
          throw invalid_input("point \"" + p + "\" missing from the preimage list of \"" + v + "\"");
    }
    f.map_ = std::move(map);
    f.preimages_ = std::move(preimages);
    return f;
  }

  /// Parses "pred" or "div:K".
  static EndofunctionSpec parse_builtin(const std::string& text) {
    if (text == "pred") return pred();
    if (text.rfind("div:", 0) == 0) {
      std::uint64_t k = 0;
      const char* first = text.data() + 4;
      const char* last = text.data() + text.size();
      auto [ptr, ec] = std::from_chars(first, last, k);
      if (ec != std::errc{} || ptr != last || first == last) throw invalid_input("bad divisor in \"" + text + "\"");
      return div(k);
    }
    throw invalid_input("unknown function family \"" + text + "\" (expected pred or div:K)");
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& family() const noexcept { return family_; }
  std::uint64_t k() const noexcept { return k_; }
  const std::map<std::string, std::string>& map() const noexcept { return map_; }
  const std::optional<std::map<std::string, std::vector<std::string>>>& preimage_table() const noexcept {
    return preimages_;
  }
  bool has_preimage_oracle() const noexcept { return kind_ == Kind::builtin || preimages_.has_value(); }

  bool in_domain(const std::string& p) const {
    if (kind_ == Kind::table) return map_.contains(p);
    return parse_natural(p).has_value();
  }

  std::string apply(const std::string& p) const {
    if (kind_ == Kind::table) {
      auto it = map_.find(p);
      if (it == map_.end()) throw invalid_input("point \"" + p + "\" is outside the domain");
      return it->second;
    }
    std::uint64_t n = natural_or_throw(p);
    if (family_ == "pred") return std::to_string(n == 0 ? 0 : n - 1);
    return std::to_string(n / k_);
  }

  /// f^{-1}(p), in ascending order for built-in families and listed order for tables.
  std::vector<std::string> preimage(const std::string& p) const {
    if (kind_ == Kind::table) {
      if (!preimages_) throw invalid_input("table spec has no preimage lists");
      if (!map_.contains(p)) throw invalid_input("point \"" + p + "\" is outside the domain");
      auto it = preimages_->find(p);
      return it == preimages_->end() ? std::vector<std::string>{} : it->second;
    }
    std::uint64_t m = natural_or_throw(p);
    std::vector<std::string> out;
    if (family_ == "pred") {
      if (m == 0) out.push_back("0");
      if (m == UINT64_MAX) throw resource_error("preimage exceeds 64-bit range");
      out.push_back(std::to_string(m + 1));
      return out;
    }
    if (m > (UINT64_MAX - (k_ - 1)) / k_) throw resource_error("preimage exceeds 64-bit range");
    for (std::uint64_t i = 0; i < k_; ++i) out.push_back(std::to_string(k_ * m + i));
    return out;
  }

private:
  static std::optional<std::uint64_t> parse_natural(const std::string& p) {
    if (p.empty() || (p.size() > 1 && p[0] == '0')) return std::nullopt;
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), n);
    if (ec != std::errc{} || ptr != p.data() + p.size()) return std::nullopt;
    return n;
  }
  static std::uint64_t natural_or_throw(const std::string& p) {
    if (auto n = parse_natural(p)) return *n;
    throw invalid_input("\"" + p + "\" is not a natural number");
  }

  Kind kind_ = Kind::builtin;
  std::string family_;
  std::uint64_t k_ = 0;
  std::map<std::string, std::string> map_;
  std::optional<std::map<std::string, std::vector<std::string>>> preimages_;
};

struct WitnessPair {
  std::string x;
  std::string y;

  static WitnessPair checked(const EndofunctionSpec& f, std::string x, std::string y) {
    if (x == y) throw invalid_input("witness points must be distinct");
    if (!f.in_domain(x) || !f.in_domain(y)) throw invalid_input("witness point outside the domain");
    if (f.apply(x) != f.apply(y))
      throw invalid_input("witness pair (" + x + ", " + y + ") is not identified by f");
    return {std::move(x), std::move(y)};
  }
};

struct SurjectionTree {
  TruncatedTree tree;
  std::size_t requested_depth = 0;
  /// Some level before the requested depth came out empty; `tree` then has its
  /// actual (smaller) height.
  bool died_out = false;
};

/// Levels L_0 = {x}, L_{n+1} = g^{-1}(L_n) with g = f away from x, up to `depth`.
inline SurjectionTree surjection_to_tree(const EndofunctionSpec& f, const WitnessPair& w, std::size_t depth,
                                         std::size_t node_budget = default_node_budget) {
  if (!f.has_preimage_oracle()) throw invalid_input("preimage oracle missing: table spec has no preimage lists");
  WitnessPair checked = WitnessPair::checked(f, w.x, w.y);

  std::vector<NodeRecord> records{{checked.x, std::nullopt}};
  std::set<std::string> seen{checked.x};
  std::vector<std::string> frontier{checked.x};
  SurjectionTree out{TruncatedTree::from_records({{checked.x, std::nullopt}}), depth, false};
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<std::string> next;
    for (const auto& a : frontier) {
      for (auto& b : f.preimage(a)) {
        if (b == checked.x) continue;  // x is outside the domain of g
        if (!seen.insert(b).second)
          throw invalid_input("point \"" + b + "\" reached on two levels; preimage oracle is inconsistent");
        records.push_back({b, a});
        next.push_back(std::move(b));
      }
    }
    if (records.size() > node_budget) throw resource_error("surjection tree exceeds node budget");
    if (next.empty()) {
      out.died_out = true;
      break;
    }
    frontier = std::move(next);
  }
  out.tree = TruncatedTree::from_records(std::move(records), std::nullopt, "surjection");
  return out;
}

/// Each non-root node goes to its parent; the root is fixed.
inline std::map<std::string, std::string> tree_to_surjection(const TruncatedTree& t) {
  std::map<std::string, std::string> f;
  for (NodeIndex x = 0; x < t.size(); ++x)
    f.emplace(t.id(x), t.parent(x) == no_node ? t.id(x) : t.id(t.parent(x)));
  return f;
}

/// Whether every level is finite.  Always true for a truncation; kept as an
/// explicit check because the finite-to-one variant of the surjection/tree
/// correspondence (finite levels, no leaves) differs from the general one
/// exactly in this condition.
inline bool is_finite_to_one_levels(const TruncatedTree&) { return true; }

}  // namespace omt
