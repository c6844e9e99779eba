#include <gtest/gtest.h>

#include "corpus.hpp"
#include "omegatree/io.hpp"

using namespace omt;
using omt::io::json;

namespace {

std::string data(const std::string& name) { return std::string(OMT_DATA_DIR) + "/" + name; }

}  // namespace

TEST(TreeJson, RoundTrip) {
  for (const auto& e : corpus::random_entries(100)) {
    auto t = corpus::build(e);
    auto back = io::tree_from_json(json::parse(io::tree_to_json(t).dump()));
    EXPECT_TRUE(back == t);
    EXPECT_EQ(back.name(), t.name());
  }
}

TEST(TreeJson, ReadsSampleFiles) {
  auto t = io::tree_from_json(io::read_json_file(data("ab_tree.json")));
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_THROW(io::tree_from_json(io::read_json_file(data("broken_tree.json"))), invalid_input);
  EXPECT_THROW(io::read_json_file(data("no_such_file.json")), invalid_input);
}

TEST(TreeJson, MalformedDocuments) {
  EXPECT_THROW(io::tree_from_json(json::parse("[]")), invalid_input);
  EXPECT_THROW(io::tree_from_json(json::parse(R"({"nodes": [{"parent": null}]})")), invalid_input);
  EXPECT_THROW(io::tree_from_json(json::parse(R"({"nodes": [{"id": 3, "parent": null}]})")), invalid_input);
  EXPECT_THROW(io::tree_from_json(json::parse(R"({"depth": -1, "nodes": [{"id": "r", "parent": null}]})")),
               invalid_input);
  EXPECT_THROW(io::parse_json("{", "test"), invalid_input);
  auto t = io::tree_from_json(json::parse(R"({"boundary_is_cut": true, "nodes": [{"id": "r"}]})"));
  EXPECT_EQ(t.size(), 1u);
}

TEST(TemplateJson, RoundTrip) {
  for (const auto& e : corpus::random_entries(200)) {
    auto tpl = extract_template(corpus::build(e));
    EXPECT_EQ(io::template_from_json(json::parse(io::template_to_json(tpl).dump())), tpl);
  }
  auto path = io::template_from_json(io::read_json_file(data("path_template.json")));
  EXPECT_EQ(decode_template(path, 2).size(), 9u);
}

TEST(TemplateJson, Rejects) {
  EXPECT_THROW(io::template_from_json(json::parse(R"({"depth": 0, "levels": [[{"block": "0:0", "size": 2}]]})")),
               invalid_input);
  EXPECT_THROW(io::template_from_json(json::parse(
                   R"({"depth": 1, "levels": [[{"block": "0:0", "size": 1, "labels": [["1:9", 1]]}],
                                              [{"block": "1:0", "size": 1}]]})")),
               invalid_input);
}

TEST(EndofunctionJson, Kinds) {
  auto f = io::endofunction_from_json(io::read_json_file(data("div2.json")));
  EXPECT_EQ(f.apply("7"), "3");
  auto g = io::endofunction_from_json(io::read_json_file(data("table_fn.json")));
  EXPECT_EQ(g.preimage("b"), (std::vector<std::string>{"c", "d"}));
  EXPECT_THROW(io::endofunction_from_json(json::parse(R"({"kind": "builtin", "family": "sqrt"})")), invalid_input);
  EXPECT_THROW(io::endofunction_from_json(json::parse(R"({"kind": "other"})")), invalid_input);
}

TEST(MeetTreeJson, ReadsAnnotations) {
  auto m = io::meet_tree_from_json(io::read_json_file(data("meet_tree.json")));
  const auto& t = m.tree();
  EXPECT_FALSE(m.in_t(t.index_of("r")));
  EXPECT_TRUE(m.is_exceptional(t.index_of("m")));
  auto back = io::meet_tree_from_json(json::parse(io::meet_tree_to_json(m).dump()));
  EXPECT_EQ(back.in_t_flags(), m.in_t_flags());
  EXPECT_EQ(back.special(), m.special());
}

TEST(PermActionJson, IndicesOrIds) {
  auto a = io::perm_action_from_json(io::read_json_file(data("socks.json")));
  EXPECT_EQ(orbits(a).size(), 2u);
  auto b = io::perm_action_from_json(json::parse(R"({"points": ["x", "y"], "generators": [["y", "x"]]})"));
  EXPECT_EQ(b.generators()[0], (Perm{1, 0}));
  EXPECT_THROW(io::perm_action_from_json(json::parse(R"({"points": ["x", "y"], "generators": [[0, 0]]})")),
               invalid_input);
}

TEST(WreathJson, RoundTrip) {
  auto spec = io::wreath_spec_from_json(io::read_json_file(data("wreath_spec.json")));
  ASSERT_EQ(spec.levels.size(), 2u);
  EXPECT_EQ(spec.levels[1].group.kind, LevelGroup::Kind::cyclic);
  auto again = io::wreath_spec_from_json(json::parse(io::wreath_spec_to_json(spec).dump()));
  EXPECT_EQ(again.levels.size(), 2u);
  auto expl = io::wreath_spec_from_json(json::parse(R"({"levels": [{"size": 3, "group": {"generators": [[1, 2, 0]]}}]})"));
  EXPECT_EQ(expl.levels[0].group.kind, LevelGroup::Kind::explicit_generators);
  EXPECT_THROW(io::wreath_spec_from_json(json::parse(R"({"levels": [{"size": 3, "group": "dihedral"}]})")),
               invalid_input);
}

TEST(ResultJson, GameResult) {
  auto single = io::tree_from_json(io::read_json_file(data("single.json")));
  auto chain = io::tree_from_json(io::read_json_file(data("chain2.json")));
  auto j = io::game_result_to_json(ef_equivalent(single, chain, 2));
  EXPECT_FALSE(j["equivalent"].get<bool>());
  EXPECT_EQ(j["witness"].size(), 2u);
  EXPECT_FALSE(io::game_result_to_json(ef_equivalent(chain, chain, 2)).contains("witness"));
}
