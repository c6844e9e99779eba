// omt: command-line front end for the omegatree library.
//
// Exit codes: 0 success, 1 negative decision (embed/iso/ef), 2 usage or
// malformed input, 3 resource budget exceeded.  Payloads go to stdout as JSON
// (or DOT with --dot), diagnostics to stderr.

#include <charconv>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omegatree/balance.hpp"
#include "omegatree/equivalence.hpp"
#include "omegatree/group_actions.hpp"
#include "omegatree/io.hpp"
#include "omegatree/meet_trees.hpp"
#include "omegatree/surjection.hpp"
#include "omegatree/template.hpp"
#include "omegatree/tree.hpp"

namespace {

using omt::io::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw omt::invalid_input("\"" + s + "\" is not a non-negative integer");
  return v;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// Documents produced by `gen wreath` bundle a tree and an action; commands
// taking one of them accept either the bare document or the bundle.
json member_or_self(const json& j, const char* key) {
  return j.is_object() && j.contains(key) ? j.at(key) : j;
}

omt::TruncatedTree load_tree(const std::string& path) {
  return omt::io::tree_from_json(member_or_self(omt::io::read_json_file(path), "tree"));
}

struct Options {
  std::string file, file2;
  std::optional<std::size_t> depth, rank, max_rank = 6, maxA, from;
  std::size_t threshold = 0;
  std::string set, branch, counts, fn, witness, spec, sizes, groups;
  std::size_t arity = 2, max_branch = 3;
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget;
  bool dot = false;
};

void emit_tree(const omt::TruncatedTree& t, const Options& o) {
  if (o.dot)
    std::cout << omt::to_dot(t);
  else
    print(omt::io::tree_to_json(t));
}

std::size_t node_budget(const Options& o) { return o.budget.value_or(omt::default_node_budget); }

omt::EfBudget ef_budget(const Options& o) {
  omt::EfBudget b;
  if (o.budget) b.max_states = *o.budget;
  return b;
}

std::size_t common_depth(const omt::TruncatedTree& a, const omt::TruncatedTree& b, const Options& o) {
  return o.depth.value_or(std::min(a.depth(), b.depth()));
}

omt::NodeSet meet_set(const omt::FiniteMeetTree& m, const Options& o) {
  return omt::io::node_set_from_ids(m.tree(), split(o.set, ','));
}

int run_meets(const Options& o) {
  auto m = omt::io::meet_tree_from_json(omt::io::read_json_file(o.file));
  const auto& t = m.tree();
  json points = json::array();
  for (omt::NodeIndex x : omt::ramification_points(m))
    points.push_back({{"node", t.id(x)},
                      {"order", omt::ramification_order(m, x)},
                      {"in_T", m.in_t(x)},
                      {"exceptional", m.is_exceptional(x)}});
  json out = {{"ramificationPoints", std::move(points)}};
  if (!o.set.empty()) out["closure"] = omt::io::ids(t, omt::semilattice_closure(m, meet_set(m, o)));
  print(out);
  return 0;
}

int run_group(const std::string& what, const Options& o) {
  auto a = omt::io::perm_action_from_json(member_or_self(omt::io::read_json_file(o.file), "action"));
  if (what == "orbits") {
    json orbits = json::array();
    for (const auto& orb : omt::orbits(a)) orbits.push_back(omt::io::point_ids(a, orb));
    print({{"orbits", std::move(orbits)}});
    return 0;
  }
  if (what == "dcl") {
    omt::PointSet s;
    for (const auto& id : split(o.set, ',')) s.push_back(a.index_of(id));
    omt::DclOracle dcl(a);
    print({{"dcl", omt::io::point_ids(a, dcl(s))},
           {"groupOrder", omt::order_to_string(dcl.group_order())}});
    return 0;
  }
  auto report = omt::dcl_is_locally_finite_probe(a, o.maxA.value_or(2), o.threshold, o.seed,
                                                 o.budget.value_or(20'000));
  print(omt::io::probe_to_json(a, report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-depth omega-tree toolkit"};
  app.require_subcommand(1);
  Options o;

  auto file_arg = [&](CLI::App* c) { c->add_option("file", o.file, "input JSON document")->required(); };
  auto pair_args = [&](CLI::App* c) {
    c->add_option("first", o.file, "first tree")->required();
    c->add_option("second", o.file2, "second tree")->required();
  };
  auto dot_flag = [&](CLI::App* c) { c->add_flag("--dot", o.dot, "print Graphviz DOT instead of JSON"); };
  auto budget_opt = [&](CLI::App* c) { c->add_option("--budget", o.budget, "work budget (nodes, states or subsets)"); };

  auto* gen = app.add_subcommand("gen", "generate trees and wreath actions");
  gen->require_subcommand(1);
  auto* gen_complete = gen->add_subcommand("complete", "complete k-ary tree");
  gen_complete->add_option("--arity", o.arity)->default_val(2);
  gen_complete->add_option("--depth", o.depth)->required();
  auto* gen_levels = gen->add_subcommand("levels", "tree from per-node child counts, levels separated by '/'");
  gen_levels->add_option("--counts", o.counts, "e.g. 2/2,1")->required();
  auto* gen_random = gen->add_subcommand("random", "seeded random tree reaching its depth");
  gen_random->add_option("--seed", o.seed)->default_val(0);
  gen_random->add_option("--branch", o.max_branch)->default_val(3);
  gen_random->add_option("--depth", o.depth)->required();
  auto* gen_wreath = gen->add_subcommand("wreath", "iterated wreath product acting on its tree");
  gen_wreath->add_option("--sizes", o.sizes, "level sizes, e.g. 2,3");
  gen_wreath->add_option("--spec", o.spec, "wreath spec JSON file instead of --sizes/--groups");
  gen_wreath->add_option("--groups", o.groups, "sym or cyclic per level (default sym)");
  for (auto* c : {gen_complete, gen_levels, gen_random, gen_wreath}) {
    dot_flag(c);
    budget_opt(c);
  }

  auto* balance_cmd = app.add_subcommand("balance", "balanced full-height subtree");
  file_arg(balance_cmd);
  balance_cmd->add_option("--depth", o.depth, "truncate to this depth first");
  dot_flag(balance_cmd);

  auto* tpl = app.add_subcommand("template", "templates");
  tpl->require_subcommand(1);
  auto* tpl_extract = tpl->add_subcommand("extract", "template of a tree");
  file_arg(tpl_extract);
  auto* tpl_decode = tpl->add_subcommand("decode", "canonical tree of a template");
  file_arg(tpl_decode);
  tpl_decode->add_option("--depth", o.depth);
  dot_flag(tpl_decode);
  budget_opt(tpl_decode);
  auto* tpl_branches = tpl->add_subcommand("singleton-branches", "branches with labels 1 from a level on");
  file_arg(tpl_branches);
  tpl_branches->add_option("--from", o.from)->required();
  budget_opt(tpl_branches);
  auto* tpl_subtree = tpl->add_subcommand("branch-subtree", "balanced subtree carried by a block branch");
  file_arg(tpl_subtree);
  tpl_subtree->add_option("--branch", o.branch, "block ids, one per level, comma separated")->required();
  dot_flag(tpl_subtree);

  auto* embed = app.add_subcommand("embed", "local embeddability of the first n levels");
  auto* iso = app.add_subcommand("iso", "local isomorphism of the first n levels");
  for (auto* c : {embed, iso}) {
    pair_args(c);
    c->add_option("--depth", o.depth, "number of levels (default: smaller depth)");
  }
  auto* ef = app.add_subcommand("ef", "bounded-rank EF game on the ancestor order");
  pair_args(ef);
  ef->add_option("--rank", o.rank)->required();
  budget_opt(ef);
  auto* rank = app.add_subcommand("rank", "least distinguishing EF rank");
  pair_args(rank);
  rank->add_option("--max-rank", o.max_rank)->default_val(6);
  budget_opt(rank);

  auto* surj = app.add_subcommand("surj", "surjection / tree correspondence");
  surj->require_subcommand(1);
  auto* surj_tree = surj->add_subcommand("tree", "tree of a non-injective surjection");
  surj_tree->add_option("--fn", o.fn, "pred or div:K");
  surj_tree->add_option("--spec", o.spec, "endofunction JSON file");
  surj_tree->add_option("--witness", o.witness, "x,y with f(x) = f(y)")->required();
  surj_tree->add_option("--depth", o.depth)->required();
  dot_flag(surj_tree);
  budget_opt(surj_tree);
  auto* surj_from = surj->add_subcommand("from-tree", "surjection of a tree");
  file_arg(surj_from);

  auto* meets = app.add_subcommand("meets", "ramification points, and the meet closure of --set");
  file_arg(meets);
  meets->add_option("--set", o.set);
  auto* dclsemi = app.add_subcommand("dclsemi", "definable closure in a meet tree");
  file_arg(dclsemi);
  dclsemi->add_option("--set", o.set);
  auto* code = app.add_subcommand("code", "observed code of a meet tree");
  file_arg(code);
  auto* decompose = app.add_subcommand("decompose", "pieces of T relative to --set");
  file_arg(decompose);
  decompose->add_option("--set", o.set);

  auto* group = app.add_subcommand("group", "permutation actions");
  group->require_subcommand(1);
  auto* g_orbits = group->add_subcommand("orbits", "orbits of the action");
  file_arg(g_orbits);
  auto* g_dcl = group->add_subcommand("dcl", "points fixed by the pointwise stabilizer of --set");
  file_arg(g_dcl);
  g_dcl->add_option("--set", o.set);
  auto* g_probe = group->add_subcommand("probe", "closure sizes over small subsets");
  file_arg(g_probe);
  g_probe->add_option("--maxA", o.maxA)->default_val(2);
  g_probe->add_option("--threshold", o.threshold, "report subsets whose closure is larger")->default_val(0);
  g_probe->add_option("--seed", o.seed)->default_val(0);
  budget_opt(g_probe);

  auto* validate = app.add_subcommand("validate", "check a tree document");
  file_arg(validate);
  auto* dot = app.add_subcommand("dot", "Graphviz rendering of a tree");
  file_arg(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      if (gen_complete->parsed()) emit_tree(omt::complete_tree(o.arity, *o.depth, node_budget(o)), o);
      if (gen_random->parsed()) emit_tree(omt::random_tree(o.seed, o.max_branch, *o.depth), o);
      if (gen_levels->parsed()) {
        std::vector<std::vector<std::size_t>> counts;
        for (const auto& level : split(o.counts, '/')) {
          counts.emplace_back();
          for (const auto& c : split(level, ',')) counts.back().push_back(to_size(c));
        }
        emit_tree(omt::level_spec_tree(counts), o);
      }
      if (gen_wreath->parsed()) {
        omt::WreathSpec spec;
        if (!o.spec.empty()) {
          spec = omt::io::wreath_spec_from_json(omt::io::read_json_file(o.spec));
        } else {
          auto sizes = split(o.sizes, ',');
          auto groups = split(o.groups, ',');
          if (!groups.empty() && groups.size() != sizes.size())
            throw omt::invalid_input("--groups must name one group per level");
          for (std::size_t n = 0; n < sizes.size(); ++n) {
            std::string g = groups.empty() ? "sym" : groups[n];
            spec.levels.push_back({to_size(sizes[n]), omt::io::level_group_from_json(json(g))});
          }
        }
        auto w = omt::wreath_tree(spec, o.budget.value_or(100'000));
        if (o.dot)
          std::cout << omt::to_dot(w.tree);
        else
          print({{"spec", omt::io::wreath_spec_to_json(spec)},
                 {"tree", omt::io::tree_to_json(w.tree)},
                 {"action", omt::io::perm_action_to_json(w.action)}});
      }
      return 0;
    }
    if (balance_cmd->parsed()) {
      emit_tree(omt::balance(load_tree(o.file), o.depth), o);
      return 0;
    }
    if (tpl->parsed()) {
      if (tpl_extract->parsed()) print(omt::io::template_to_json(omt::extract_template(load_tree(o.file))));
      if (tpl_decode->parsed()) {
        auto t = omt::io::template_from_json(omt::io::read_json_file(o.file));
        emit_tree(omt::decode_template(t, o.depth.value_or(t.depth), node_budget(o)), o);
      }
      if (tpl_branches->parsed()) {
        auto t = omt::io::template_from_json(omt::io::read_json_file(o.file));
        json out = json::array();
        for (const auto& b : omt::eventually_singleton_branches(t, *o.from, o.budget.value_or(1'000'000)))
          out.push_back(omt::io::branch_to_json(t, b));
        print({{"from", *o.from}, {"branches", std::move(out)}});
      }
      if (tpl_subtree->parsed()) {
        auto t = load_tree(o.file);
        auto x = omt::extract_template(t);
        emit_tree(omt::branch_subtree(t, x, omt::branch_from_ids(x, split(o.branch, ','))), o);
      }
      return 0;
    }
    if (embed->parsed() || iso->parsed()) {
      auto a = load_tree(o.file);
      auto b = load_tree(o.file2);
      std::size_t n = common_depth(a, b, o);
      if (iso->parsed()) {
        bool same = omt::locally_isomorphic(a, b, n);
        print({{"isomorphic", same}, {"depth", n}});
        return same ? 0 : 1;
      }
      auto e = omt::local_embeddable(a, b, n);
      print({{"embeddable", e.has_value()}, {"depth", n}, {"embedding", e ? omt::io::embedding_to_json(*e) : json(nullptr)}});
      return e ? 0 : 1;
    }
    if (ef->parsed()) {
      auto g = omt::ef_equivalent(load_tree(o.file), load_tree(o.file2), *o.rank, ef_budget(o));
      print(omt::io::game_result_to_json(g));
      return g.equivalent ? 0 : 1;
    }
    if (rank->parsed()) {
      auto r = omt::distinguishing_rank(load_tree(o.file), load_tree(o.file2), *o.max_rank, ef_budget(o));
      print({{"maxRank", *o.max_rank}, {"distinguishingRank", r ? json(*r) : json(nullptr)}});
      return 0;
    }
    if (surj_tree->parsed()) {
      if (o.fn.empty() == o.spec.empty()) throw omt::invalid_input("give exactly one of --fn and --spec");
      auto f = o.fn.empty() ? omt::io::endofunction_from_json(omt::io::read_json_file(o.spec))
                            : omt::EndofunctionSpec::parse_builtin(o.fn);
      auto w = split(o.witness, ',');
      if (w.size() != 2) throw omt::invalid_input("--witness takes two points x,y");
      auto r = omt::surjection_to_tree(f, {w[0], w[1]}, *o.depth, node_budget(o));
      if (o.dot) {
        std::cout << omt::to_dot(r.tree);
      } else {
        json out = omt::io::tree_to_json(r.tree);
        out["requestedDepth"] = r.requested_depth;
        out["diedOut"] = r.died_out;
        print(out);
      }
      return 0;
    }
    if (surj_from->parsed()) {
      json map = json::object();
      for (const auto& [k, v] : omt::tree_to_surjection(load_tree(o.file))) map[k] = v;
      print({{"kind", "table"}, {"map", std::move(map)}});
      return 0;
    }
    if (meets->parsed()) return run_meets(o);
    if (dclsemi->parsed() || code->parsed() || decompose->parsed()) {
      auto m = omt::io::meet_tree_from_json(omt::io::read_json_file(o.file));
      if (code->parsed()) print(omt::io::code_to_json(omt::observed_code(m)));
      if (dclsemi->parsed())
        print({{"dcl", omt::io::ids(m.tree(), omt::definable_closure_semilattice(m, meet_set(m, o)))}});
      if (decompose->parsed()) {
        auto d = omt::relative_decomposition(m, meet_set(m, o));
        if (auto err = omt::check_decomposition(m, d)) throw std::logic_error("decomposition check failed: " + *err);
        print(omt::io::decomposition_to_json(m, d));
      }
      return 0;
    }
    if (g_orbits->parsed()) return run_group("orbits", o);
    if (g_dcl->parsed()) return run_group("dcl", o);
    if (g_probe->parsed()) return run_group("probe", o);
    if (validate->parsed()) {
      auto t = load_tree(o.file);
      json sizes = json::array();
      for (const auto& l : t.levels()) sizes.push_back(l.size());
      print({{"valid", true}, {"name", t.name()}, {"depth", t.depth()}, {"nodes", t.size()}, {"levelSizes", sizes}});
      return 0;
    }
    if (dot->parsed()) {
      std::cout << omt::to_dot(load_tree(o.file));
      return 0;
    }
  } catch (const omt::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const omt::resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
