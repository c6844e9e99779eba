#include <gtest/gtest.h>

#include <random>

#include "omegatree/error.hpp"
#include "omegatree/meet_trees.hpp"
#include "oracles.hpp"

using namespace omt;

namespace {

FiniteMeetTree all_in_t(const TruncatedTree& t, std::vector<std::pair<std::string, std::string>> special = {}) {
  return FiniteMeetTree::make(t, std::vector<bool>(t.size(), true), special);
}

// r -> m, r -> s;  m -> x, m -> p;  p -> y, p -> q
TruncatedTree seven() {
  return TruncatedTree::from_records({{"r", std::nullopt},
                                      {"m", "r"},
                                      {"s", "r"},
                                      {"x", "m"},
                                      {"p", "m"},
                                      {"y", "p"},
                                      {"q", "p"}});
}

NodeSet ids(const TruncatedTree& t, std::initializer_list<const char*> names) {
  NodeSet s;
  for (auto n : names) s.push_back(t.index_of(n));
  std::sort(s.begin(), s.end());
  return s;
}

// Pieces evaluated straight from their set-builder definitions.
NodeSet upper_by_definition(const FiniteMeetTree& m, std::optional<NodeIndex> a) {
  NodeSet out;
  for (NodeIndex x = 0; x < m.tree().size(); ++x)
    if (m.in_t(x) && (!a || m.tree().is_strictly_below(*a, x))) out.push_back(x);
  return out;
}

}  // namespace

TEST(Meet, Examples) {
  auto m = all_in_t(seven());
  const auto& t = m.tree();
  NodeIndex x = t.index_of("x"), y = t.index_of("y"), mm = t.index_of("m");
  EXPECT_EQ(meet(m, x, x), x);
  EXPECT_EQ(meet(m, y, mm), mm);
  EXPECT_EQ(meet(m, t.index_of("m"), t.index_of("s")), t.root());
  EXPECT_THROW(meet(m, 0, 99), invalid_input);
}

TEST(Meet, SemilatticeLawsExhaustive) {
  // All annotated trees up to 8 nodes whose annotation is a valid meet tree.
  std::size_t specimens = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (const auto& p : oracle::plane_trees(n)) {
      auto t = oracle::from_parents(p);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<bool> in_t(n);
        for (std::size_t i = 0; i < n; ++i) in_t[i] = (mask >> i) & 1;
        if (!oracle::valid_annotation(t, in_t)) continue;
        auto m = FiniteMeetTree::make(t, in_t, {});
        ++specimens;
        for (NodeIndex a = 0; a < n; ++a)
          for (NodeIndex b = 0; b < n; ++b) {
            NodeIndex ab = meet(m, a, b);
            ASSERT_EQ(ab, oracle::meet_by_ancestors(t, a, b));
            ASSERT_EQ(ab, meet(m, b, a));
            for (NodeIndex c = 0; c < n; ++c) ASSERT_EQ(meet(m, ab, c), meet(m, a, meet(m, b, c)));
          }
      }
    }
  EXPECT_GT(specimens, 1000u);
}

TEST(Closure, Examples) {
  auto m = all_in_t(seven());
  const auto& t = m.tree();
  EXPECT_EQ(semilattice_closure(m, ids(t, {"x"})), ids(t, {"x"}));
  EXPECT_EQ(semilattice_closure(m, ids(t, {"m", "s"})), ids(t, {"m", "s", "r"}));
}

TEST(Closure, IsAClosureOperatorOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    auto m = oracle::random_meet_tree(rng, 12);
    const auto n = m.tree().size();
    NodeSet a, b;
    for (NodeIndex x = 0; x < n; ++x) {
      if (rng() % 3 == 0) a.push_back(x);
      if (rng() % 3 == 0 || std::binary_search(a.begin(), a.end(), x)) b.push_back(x);
    }
    auto ca = semilattice_closure(m, a);
    EXPECT_TRUE(std::includes(ca.begin(), ca.end(), a.begin(), a.end()));
    EXPECT_EQ(semilattice_closure(m, ca), ca);
    auto cb = semilattice_closure(m, b);
    EXPECT_TRUE(std::includes(cb.begin(), cb.end(), ca.begin(), ca.end()));
    if (!a.empty()) {
      EXPECT_LE(ca.size(), 2 * a.size() - 1);
    }
    // Closed under meets, and every element is in A or a meet of two members of A.
    for (NodeIndex x : ca)
      for (NodeIndex y : ca) EXPECT_TRUE(std::binary_search(ca.begin(), ca.end(), oracle::meet_by_ancestors(m.tree(), x, y)));
    for (NodeIndex z : ca) {
      bool made = std::binary_search(a.begin(), a.end(), z);
      for (NodeIndex x : a)
        for (NodeIndex y : a) made = made || oracle::meet_by_ancestors(m.tree(), x, y) == z;
      EXPECT_TRUE(made);
    }
  }
}

TEST(Ramification, Examples) {
  EXPECT_TRUE(ramification_points(all_in_t(oracle::chain(3))).empty());
  auto fork = complete_tree(2, 1);
  EXPECT_EQ(ramification_points(all_in_t(fork)), (NodeSet{fork.root()}));
  auto t = seven();
  auto m = all_in_t(t);
  EXPECT_EQ(ramification_points(m), ids(t, {"r", "m", "p"}));
}

TEST(Ramification, MatchesPairwiseDefinition) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    auto m = oracle::random_meet_tree(rng, 10);
    const auto& t = m.tree();
    NodeSet expected;
    for (NodeIndex a = 0; a < t.size(); ++a)
      for (NodeIndex b = 0; b < t.size(); ++b)
        if (m.in_t(a) && m.in_t(b) && !t.is_below_or_equal(a, b) && !t.is_below_or_equal(b, a))
          expected.push_back(oracle::meet_by_ancestors(t, a, b));
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    EXPECT_EQ(ramification_points(m), expected);
  }
}

TEST(Cones, PartitionStrictUpSet) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    auto m = oracle::random_meet_tree(rng, 10);
    const auto& t = m.tree();
    for (NodeIndex x = 0; x < t.size(); ++x) {
      auto cones = cones_at(m, x);
      EXPECT_EQ(cones.size(), t.degree(x));
      EXPECT_EQ(ramification_order(m, x), cones.size());
      NodeSet all;
      for (const auto& c : cones) all.insert(all.end(), c.begin(), c.end());
      std::sort(all.begin(), all.end());
      EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
      NodeSet up;
      for (NodeIndex y = 0; y < t.size(); ++y)
        if (t.is_strictly_below(x, y)) up.push_back(y);
      EXPECT_EQ(all, up);
    }
  }
}

TEST(Code, Examples) {
  auto chain = observed_code(all_in_t(oracle::chain(3)));
  EXPECT_TRUE(chain.ramification_orders.empty());
  EXPECT_EQ(chain.point_orders, (std::set<std::size_t>{1}));

  // Auxiliary root of order 2 over an auxiliary node of order 3 and a leaf.
  auto t = TruncatedTree::from_records(
      {{"r", std::nullopt}, {"u", "r"}, {"v", "r"}, {"u1", "u"}, {"u2", "u"}, {"u3", "u"}});
  auto m = FiniteMeetTree::make(t, {false, false, true, true, true, true}, {});
  EXPECT_EQ(observed_code(m).ramification_orders, (std::set<std::size_t>{2, 3}));

  auto star = level_spec_tree({{4}});
  EXPECT_TRUE(observed_code(all_in_t(star)).point_orders.contains(4));
  EXPECT_EQ(compare_codes(observed_code(m), observed_code(m)), CodeComparison::consistent);
  EXPECT_EQ(compare_codes(observed_code(m), observed_code(all_in_t(star))), CodeComparison::provably_distinct);
}

TEST(MeetTree, RejectsBadAnnotations) {
  auto t = seven();
  // s is a leaf: an auxiliary leaf separates nothing.
  EXPECT_THROW(FiniteMeetTree::make(t, {true, true, false, true, true, true, true}, {}), invalid_input);
  EXPECT_THROW(all_in_t(t, {{"x", "y"}}), invalid_input);  // x is not a ramification point
  EXPECT_THROW(all_in_t(t, {{"m", "y"}}), invalid_input);  // y is not a child of m
  EXPECT_THROW(all_in_t(t, {{"m", "x"}, {"m", "x"}}), invalid_input);
  EXPECT_THROW(FiniteMeetTree::make(t, {true}, {}), invalid_input);
}

TEST(Dcl, Examples) {
  auto t = seven();
  auto plain = all_in_t(t);
  auto a = ids(t, {"x", "y"});
  EXPECT_EQ(definable_closure_semilattice(plain, a), semilattice_closure(plain, a));
  // m is exceptional, with x the least point of its cone.
  auto special = all_in_t(t, {{"m", "x"}});
  EXPECT_EQ(definable_closure_semilattice(special, ids(t, {"y", "q"})), ids(t, {"y", "q", "p"}));
  EXPECT_EQ(definable_closure_semilattice(special, ids(t, {"y", "s"})), ids(t, {"y", "s", "r"}));
  EXPECT_EQ(definable_closure_semilattice(special, ids(t, {"p", "x"})), ids(t, {"p", "x", "m"}));
  // Two flagged cones at m: special but not exceptional, nothing is added.
  auto two = all_in_t(t, {{"m", "x"}, {"m", "p"}});
  EXPECT_EQ(definable_closure_semilattice(two, ids(t, {"y", "x"})), ids(t, {"y", "x", "m"}));
  auto one = all_in_t(t, {{"m", "p"}});
  EXPECT_EQ(definable_closure_semilattice(one, ids(t, {"y", "x"})), ids(t, {"y", "x", "m", "p"}));
}

TEST(Dcl, IdempotentAndExtensive) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    auto m = oracle::random_meet_tree(rng, 12);
    NodeSet a;
    for (NodeIndex x = 0; x < m.tree().size(); ++x)
      if (rng() % 3 == 0) a.push_back(x);
    auto d = definable_closure_semilattice(m, a);
    auto c = semilattice_closure(m, a);
    EXPECT_EQ(definable_closure_semilattice(m, d), d);
    EXPECT_TRUE(std::includes(d.begin(), d.end(), c.begin(), c.end()));
    for (NodeIndex x : d)
      if (!std::binary_search(c.begin(), c.end(), x)) {
        // Every added point is the designated least point at an exceptional point of d.
        NodeIndex p = m.tree().parent(x);
        EXPECT_TRUE(std::binary_search(d.begin(), d.end(), p));
        EXPECT_TRUE(m.is_exceptional(p));
        EXPECT_EQ(m.flagged_least(p).front(), x);
      }
  }
}

TEST(Decompose, RootOnly) {
  auto t = seven();
  auto m = all_in_t(t);
  auto d = relative_decomposition(m, ids(t, {"r"}));
  ASSERT_EQ(d.upper.size(), 1u);
  EXPECT_EQ(d.upper[0].a, t.root());
  EXPECT_EQ(d.upper[0].nodes.size(), 6u);
  EXPECT_FALSE(check_decomposition(m, d));
}

TEST(Decompose, EmptySetUsesMinusInfinity) {
  auto t = seven();
  auto m = all_in_t(t);
  auto d = relative_decomposition(m, {});
  ASSERT_EQ(d.upper.size(), 1u);
  EXPECT_FALSE(d.upper[0].a);
  EXPECT_EQ(d.upper[0].nodes.size(), 7u);
  EXPECT_TRUE(d.intervals.empty());
}

TEST(Decompose, TwoLeaves) {
  auto t = seven();
  auto m = all_in_t(t);
  NodeIndex mm = t.index_of("m");
  auto d = relative_decomposition(m, ids(t, {"x", "y"}));
  EXPECT_EQ(d.closure, ids(t, {"m", "x", "y"}));
  // U for each maximal element.
  ASSERT_EQ(d.upper.size(), 2u);
  for (const auto& u : d.upper) EXPECT_TRUE(u.nodes.empty());
  // Intervals: (-inf, m), (m, x), (m, y).
  ASSERT_EQ(d.intervals.size(), 3u);
  for (const auto& iv : d.intervals) {
    if (iv.b == mm) {
      EXPECT_FALSE(iv.a);
      EXPECT_EQ(iv.linear, ids(t, {"r"}));
      EXPECT_EQ(iv.side, ids(t, {"r", "s"}));
      ASSERT_EQ(iv.branches.size(), 1u);
      EXPECT_EQ(iv.branches[0].nodes, ids(t, {"r", "s"}));
    } else if (iv.b == t.index_of("x")) {
      EXPECT_EQ(iv.a, mm);
      EXPECT_TRUE(iv.linear.empty());
      EXPECT_EQ(iv.side, ids(t, {"p", "y", "q"}));  // the other branch
      EXPECT_TRUE(iv.branches.empty());
    } else {
      EXPECT_EQ(iv.a, mm);
      EXPECT_EQ(iv.linear, ids(t, {"p"}));
      EXPECT_EQ(iv.side, ids(t, {"x", "p", "q"}));
      ASSERT_EQ(iv.branches.size(), 1u);
      EXPECT_EQ(iv.branches[0].x, t.index_of("p"));
      EXPECT_EQ(iv.branches[0].nodes, ids(t, {"p", "q"}));
    }
  }
  EXPECT_FALSE(check_decomposition(m, d));
}

TEST(Decompose, PiecesMatchDefinitionsAndCoverOnRandomInstances) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 500; ++i) {
    auto m = oracle::random_meet_tree(rng, 12);
    const auto& t = m.tree();
    NodeSet a;
    for (NodeIndex x = 0; x < t.size(); ++x)
      if (rng() % 4 == 0) a.push_back(x);
    auto d = relative_decomposition(m, a);
    auto err = check_decomposition(m, d);
    ASSERT_FALSE(err) << *err;
    for (const auto& u : d.upper) EXPECT_EQ(u.nodes, upper_by_definition(m, u.a));
    for (const auto& iv : d.intervals) {
      for (NodeIndex y = 0; y < t.size(); ++y) {
        bool above_a = !iv.a || t.is_strictly_below(*iv.a, y);
        bool in_l = m.in_t(y) && above_a && t.is_strictly_below(y, iv.b);
        bool in_s = m.in_t(y) && above_a && !t.is_below_or_equal(iv.b, y);
        EXPECT_EQ(std::binary_search(iv.linear.begin(), iv.linear.end(), y), in_l);
        EXPECT_EQ(std::binary_search(iv.side.begin(), iv.side.end(), y), in_s);
      }
      for (const auto& br : iv.branches)
        for (NodeIndex y = 0; y < t.size(); ++y)
          EXPECT_EQ(std::binary_search(br.nodes.begin(), br.nodes.end(), y),
                    m.in_t(y) && oracle::meet_by_ancestors(t, iv.b, y) == br.x);
    }
  }
}

TEST(Decompose, CheckerRejectsBrokenPieces) {
  auto t = seven();
  auto m = all_in_t(t);
  auto d = relative_decomposition(m, ids(t, {"m"}));
  ASSERT_FALSE(check_decomposition(m, d));
  d.upper[0].nodes.pop_back();
  EXPECT_TRUE(check_decomposition(m, d));
}
