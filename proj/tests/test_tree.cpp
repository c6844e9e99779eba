#include <gtest/gtest.h>

#include <random>

#include "omegatree/error.hpp"
#include "omegatree/tree.hpp"
#include "oracles.hpp"

using namespace omt;

namespace {

TruncatedTree two_node() { return TruncatedTree::from_records({{"r", std::nullopt}, {"a", "r"}}); }

std::vector<std::size_t> sizes(const TruncatedTree& t) {
  std::vector<std::size_t> out;
  for (const auto& l : levels(t)) out.push_back(l.size());
  return out;
}

}  // namespace

TEST(Parse, TwoNodeChain) {
  auto t = two_node();
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_EQ(t.id(t.level_nodes(0)[0]), "r");
  EXPECT_EQ(t.id(t.level_nodes(1)[0]), "a");
}

TEST(Parse, Errors) {
  auto fails = [](std::vector<NodeRecord> r, const std::string& needle, std::optional<std::size_t> depth = {}) {
    try {
      TruncatedTree::from_records(std::move(r), depth);
    } catch (const invalid_input& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
      return;
    }
    ADD_FAILURE() << "expected failure mentioning " << needle;
  };
  fails({{"r", std::nullopt}, {"a", "missing"}}, "missing parent");
  fails({}, "empty");
  fails({{"r", std::nullopt}, {"r", std::nullopt}}, "duplicate");
  fails({{"r", std::nullopt}, {"s", std::nullopt}}, "multiple roots");
  fails({{"a", "b"}, {"b", "a"}}, "no root");
  fails({{"r", std::nullopt}, {"a", "b"}, {"b", "a"}}, "cycle");
  fails({{"r", std::nullopt}, {"a", "a"}}, "own parent");
  fails({{"r", std::nullopt}, {"a", "r"}}, "declared depth", 2);
}

TEST(Parse, CompleteBinaryDepthThree) {
  auto t = complete_tree(2, 3);
  EXPECT_EQ(t.size(), 15u);
  EXPECT_EQ(sizes(t), (std::vector<std::size_t>{1, 2, 4, 8}));
}

TEST(Levels, Examples) {
  EXPECT_EQ(sizes(complete_tree(2, 0)), (std::vector<std::size_t>{1}));
  EXPECT_EQ(sizes(oracle::chain(2)), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(sizes(complete_tree(2, 2)), (std::vector<std::size_t>{1, 2, 4}));
}

TEST(Levels, PartitionNodes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto t = random_tree(seed, 3, 4);
    std::vector<int> hit(t.size(), 0);
    std::size_t total = 0;
    for (std::size_t k = 0; k <= t.depth(); ++k)
      for (NodeIndex x : t.level_nodes(k)) {
        ++hit[x];
        ++total;
        EXPECT_EQ(t.level(x), k);
      }
    EXPECT_EQ(total, t.size());
    EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  }
}

TEST(InducedSubtree, Examples) {
  auto t = complete_tree(2, 1);
  std::vector<NodeIndex> all{0, 1, 2};
  EXPECT_TRUE(induced_subtree(t, all) == t);
  std::vector<NodeIndex> left{t.root(), t.children(t.root())[0]};
  auto s = induced_subtree(t, left);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.level(s.index_of(t.id(left[1]))), 1u);
  std::vector<NodeIndex> leaf_only{t.children(t.root())[1]};
  EXPECT_THROW(induced_subtree(t, leaf_only), invalid_input);
}

TEST(InducedSubtree, NotDownwardClosed) {
  auto t = complete_tree(2, 2);
  NodeIndex grandchild = t.level_nodes(2)[0];
  std::vector<NodeIndex> keep{t.root(), grandchild};
  EXPECT_THROW(induced_subtree(t, keep), invalid_input);
}

TEST(InducedSubtree, PreservesLevels) {
  auto t = random_tree(11, 3, 5);
  std::vector<NodeIndex> keep;
  for (NodeIndex x = 0; x < t.size(); ++x)
    if (t.level(x) <= 3 && (t.level(x) < 2 || x % 2 == 0)) keep.push_back(x);
  // Keep only nodes whose parent is kept.
  std::vector<bool> in(t.size(), false);
  std::vector<NodeIndex> closed;
  for (std::size_t k = 0; k <= t.depth(); ++k)
    for (NodeIndex x : t.level_nodes(k))
      if (std::find(keep.begin(), keep.end(), x) != keep.end() && (k == 0 || in[t.parent(x)])) {
        in[x] = true;
        closed.push_back(x);
      }
  auto s = induced_subtree(t, closed);
  for (NodeIndex x : closed) EXPECT_EQ(s.level(s.index_of(t.id(x))), t.level(x));
}

TEST(Generate, Shapes) {
  EXPECT_EQ(complete_tree(2, 3).size(), 15u);
  auto c = complete_tree(1, 5);
  EXPECT_EQ(c.size(), 6u);
  EXPECT_EQ(c.depth(), 5u);
  EXPECT_TRUE(random_tree(7, 3, 4) == random_tree(7, 3, 4));
  EXPECT_EQ(complete_tree(2, 1).id(1), "0.0");
  EXPECT_THROW(complete_tree(0, 3), invalid_input);
  EXPECT_THROW(complete_tree(10, 10, 1000), resource_error);
}

TEST(Generate, LevelSpec) {
  auto t = level_spec_tree({{2}, {2, 1}});
  EXPECT_EQ(sizes(t), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(t.degree(t.index_of("0.0")), 2u);
  EXPECT_THROW(level_spec_tree({{2}, {1}}), invalid_input);
}

TEST(Generate, RandomReachesDepth) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) EXPECT_EQ(random_tree(seed, 1 + seed % 3, 1 + seed % 5).depth(), 1 + seed % 5);
}

TEST(CanonicalCode, RelabelingInvariant) {
  auto a = complete_tree(2, 2);
  std::vector<NodeRecord> renamed;
  for (auto r : a.records()) {
    r.id = "x" + r.id;
    if (r.parent) r.parent = "x" + *r.parent;
    renamed.push_back(r);
  }
  std::reverse(renamed.begin(), renamed.end());
  EXPECT_EQ(canonical_code(a), canonical_code(TruncatedTree::from_records(renamed)));
  EXPECT_NE(canonical_code(oracle::chain(2)), canonical_code(level_spec_tree({{1}, {2}})));
}

TEST(CanonicalCode, AgreesWithExhaustiveIsomorphismUpToEightNodes) {
  std::vector<TruncatedTree> trees;
  for (std::size_t n = 1; n <= 8; ++n)
    for (const auto& p : oracle::plane_trees(n)) trees.push_back(oracle::from_parents(p));
  // Compare trees of equal size and depth; everything else differs on both sides.
  std::size_t compared = 0;
  for (std::size_t i = 0; i < trees.size(); ++i)
    for (std::size_t j = i; j < trees.size(); ++j) {
      const auto& a = trees[i];
      const auto& b = trees[j];
      if (a.size() != b.size() || a.depth() != b.depth()) {
        EXPECT_NE(canonical_code(a), canonical_code(b));
        continue;
      }
      ++compared;
      ASSERT_EQ(canonical_code(a) == canonical_code(b), oracle::isomorphic_exhaustive(a, b, a.depth()))
          << i << " " << j;
    }
  EXPECT_GT(compared, 1000u);
}

TEST(CanonicalCode, RandomPairsAgreeWithExhaustiveSearch) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rng() % 10;
    std::vector<std::size_t> p1(n), p2(n);
    for (std::size_t k = 1; k < n; ++k) {
      p1[k] = rng() % k;
      p2[k] = rng() % k;
    }
    auto a = oracle::from_parents(p1);
    auto b = oracle::from_parents(p2);
    bool iso = a.depth() == b.depth() && oracle::isomorphic_exhaustive(a, b, a.depth());
    EXPECT_EQ(canonical_code(a) == canonical_code(b), iso);
  }
}

TEST(Truncate, Examples) {
  auto t = random_tree(3, 3, 4);
  EXPECT_TRUE(truncate(t, t.depth()) == t);
  auto b = truncate(complete_tree(2, 3), 1);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(truncate(complete_tree(1, 5), 0).size(), 1u);
  EXPECT_THROW(truncate(t, 5), invalid_input);
}

TEST(Truncate, Composes) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto t = random_tree(seed, 3, 5);
    for (std::size_t m = 0; m <= 5; ++m)
      for (std::size_t n = 0; n <= m; ++n) EXPECT_TRUE(truncate(truncate(t, m), n) == truncate(t, n));
  }
}

TEST(Dot, EdgesAndRanks) {
  auto dot = to_dot(two_node());
  EXPECT_NE(dot.find("\"r\" -> \"a\""), std::string::npos);
  EXPECT_NE(dot.find("rank=same"), std::string::npos);
}
