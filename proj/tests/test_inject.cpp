#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "vgen/inject.hpp"
#include "vgen/parser.hpp"
#include "vgen/trainer.hpp"

using namespace vgen;

namespace {

std::string fixture(const std::string& rel) {
  std::ifstream in(std::string(VGEN_FIXTURE_DIR) + "/" + rel, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ProbabilityTable& fixture_table() {
  static const ProbabilityTable table = [] {
    auto files = load_corpus_dir(std::string(VGEN_FIXTURE_DIR) + "/corpus");
    return train_corpus(files, 2).table;
  }();
  return table;
}

NamedDesign named(const std::string& text) {
  auto r = parse_design(text);
  REQUIRE(r.ok());
  ScopeCheck sc = check_scopes(r.value());
  REQUIRE(sc.ok());
  return std::move(*sc.design);
}

// Full standalone validity: parse, scope-check, all-ground type-check.
bool strictly_valid(const std::string& text) {
  auto p = parse_design(text);
  if (!p.ok()) return false;
  ScopeCheck sc = check_scopes(p.value());
  if (!sc.ok()) return false;
  return infer(std::move(*sc.design), TypeFactMode::ConcreteDefaults).ok();
}

ValidDesign atom(uint64_t seed, bool strict = true) {
  PipelineOptions opts;
  opts.strict = strict;
  auto r = generate_valid_design(fixture_table(), seed, opts);
  REQUIRE(r.ok());
  return std::move(r.value());
}

}  // namespace

TEST_CASE("the atom pipeline emits designs that stand on their own") {
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    ValidDesign a = atom(seed);
    CHECK(a.stats.skeleton_attempts >= 1);
    CHECK(strictly_valid(render_design(a)));
  }
}

TEST_CASE("the atom pipeline is deterministic per seed") {
  ValidDesign a = atom(77);
  ValidDesign b = atom(77);
  CHECK(render_design(a) == render_design(b));
  CHECK(a.seed == b.seed);
  bool any_different = false;
  for (uint64_t seed = 78; seed <= 88 && !any_different; ++seed)
    any_different = render_design(atom(seed)) != render_design(a);
  CHECK(any_different);
}

TEST_CASE("renaming shifts every minted ordinal consistently") {
  ValidDesign a = atom(5);
  int before_next = a.typed.design.next_id;
  NamedDesign renamed = rename_design(a.typed.design, 100);
  CHECK(renamed.next_id == before_next + 100);

  std::set<std::string> module_names;
  for (const auto& m : renamed.modules) {
    module_names.insert(m.name);
    for (const auto& s : m.symbols) {
      if (s.name.rfind("id_", 0) == 0) {
        int ord = std::stoi(s.name.substr(3));
        CHECK(ord >= 100);
      }
    }
    CHECK(renamed.module_by_name.at(m.name) < static_cast<int>(renamed.modules.size()));
  }
  for (int leaf : renamed.tree.leaves()) {
    const auto& n = renamed.tree.at(leaf);
    if (n.tok.kind == Tok::identifier && n.tok.lexeme.rfind("id_", 0) == 0)
      CHECK(std::stoi(n.tok.lexeme.substr(3)) >= 100);
  }

  // The renamed text is the same design under new names.
  CHECK(strictly_valid(print_tree(renamed.tree)));
  CHECK(renamed.modules.size() == a.typed.design.modules.size());
}

TEST_CASE("appending merges trees and tables without collisions") {
  ValidDesign a = atom(11);
  ValidDesign b = atom(12);
  NamedDesign dst = a.typed.design;
  NamedDesign src = rename_design(b.typed.design, dst.next_id);
  size_t want_modules = dst.modules.size() + src.modules.size();
  append_design(dst, src);

  CHECK(dst.modules.size() == want_modules);
  for (const auto& m : dst.modules) {
    CHECK(dst.module_by_name.at(m.name) >= 0);
    // Each ModuleInfo's node must point at a ModuleDecl in the merged tree.
    CHECK(dst.tree.lhs_of(m.node) == NT::ModuleDecl);
  }
  CHECK(strictly_valid(print_tree(dst.tree)));
}

TEST_CASE("pool entries read the defaulted port signatures") {
  NamedDesign d = named(fixture("corpus/counter.v"));
  auto entries = pool_entries(d);
  REQUIRE(entries.size() == 1);
  const PoolEntry& e = entries[0];
  CHECK(e.module_name == "counter");
  CHECK(!e.consumed);
  REQUIRE(e.ports.size() == 4);
  CHECK(e.ports[0].name == "clk");
  CHECK(e.ports[0].dir == Direction::In);
  CHECK(e.ports[0].type == ConcreteType{Family::Net, 1, false});
  CHECK(e.ports[2].type == ConcreteType{Family::Net, 8, false});
  CHECK(e.ports[3].name == "count");
  CHECK(e.ports[3].dir == Direction::Out);
  CHECK(e.ports[3].type == ConcreteType{Family::Var, 8, false});
}

TEST_CASE("instantiation edges and acyclicity") {
  NamedDesign gadgets = named(fixture("corpus/gadgets.v"));
  auto edges = instantiation_edges(gadgets);
  int top = gadgets.module_by_name.at("top");
  int alu = gadgets.module_by_name.at("alu");
  REQUIRE(edges.size() == 2);  // u0 and u1
  for (const auto& [from, to] : edges) {
    CHECK(from == top);
    CHECK(to == alu);
  }
  CHECK(instantiation_acyclic(gadgets));

  // Mutual instantiation passes scoping (module names are file-wide) but
  // is cyclic.
  NamedDesign loop = named(
      "module a ; b u0 ( ) ; endmodule\n"
      "module b ; a u1 ( ) ; endmodule\n");
  CHECK(!instantiation_acyclic(loop));
}

TEST_CASE("the trained gate share follows the corpus") {
  // The fixture corpus instantiates three gates and two modules.
  CHECK(gate_probability_from(fixture_table()) == doctest::Approx(0.6));

  // A corpus with neither falls back to the default.
  TrainResult tiny = train_corpus({{"t.v", "module m ; endmodule"}}, 2);
  CHECK(gate_probability_from(tiny.table) == doctest::Approx(0.3));
}

TEST_CASE("a budget of one token returns the first atom untouched") {
  InjectionConfig cfg;
  cfg.token_budget = 1;
  cfg.atom.strict = true;
  auto r = grow_design(fixture_table(), 1234, cfg);
  REQUIRE(r.ok());
  const GrownDesign& g = r.value();
  CHECK(g.stats.injections == 0);
  CHECK(g.stats.iterations == 1);
  CHECK(g.stats.atoms.skeleton_attempts >= 1);
  CHECK(print_tree(g.typed.design.tree).size() > 0);
}

TEST_CASE("growth reaches the token budget and stays strictly valid") {
  InjectionConfig cfg;
  cfg.token_budget = 150;
  cfg.atom.strict = true;
  for (uint64_t seed : {7ull, 21ull, 63ull}) {
    auto r = grow_design(fixture_table(), seed, cfg);
    REQUIRE(r.ok());
    const GrownDesign& g = r.value();
    CHECK(g.seed == seed);
    int tokens = g.typed.design.tree.leaf_count();
    CHECK(tokens >= 150);
    CHECK(instantiation_acyclic(g.typed.design));
    CHECK(strictly_valid(print_tree(g.typed.design.tree)));
  }
}

TEST_CASE("growth is deterministic per seed") {
  InjectionConfig cfg;
  cfg.token_budget = 200;
  cfg.atom.strict = true;
  auto a = grow_design(fixture_table(), 5150, cfg);
  auto b = grow_design(fixture_table(), 5150, cfg);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(print_tree(a.value().typed.design.tree) == print_tree(b.value().typed.design.tree));
  auto c = grow_design(fixture_table(), 5151, cfg);
  REQUIRE(c.ok());
  CHECK(print_tree(a.value().typed.design.tree) != print_tree(c.value().typed.design.tree));
}

TEST_CASE("the engine absorbs atoms into one growing namespace") {
  InjectionConfig cfg;
  cfg.atom.strict = true;
  InjectionEngine engine(cfg, 99);
  CHECK(engine.empty());

  int total_modules = 0;
  int prev_tokens = 0;
  for (uint64_t seed : {31ull, 32ull, 33ull}) {
    ValidDesign a = atom(seed);
    total_modules += static_cast<int>(a.typed.design.modules.size());
    engine.absorb(a);
    CHECK(!engine.empty());
    CHECK(engine.tokens() >= prev_tokens);
    prev_tokens = engine.tokens();
  }
  CHECK(static_cast<int>(engine.pool().size()) == total_modules);
  CHECK(static_cast<int>(engine.design().modules.size()) == total_modules);
  CHECK(strictly_valid(print_tree(engine.design().tree)));

  // Single steered injection attempts keep the design well-formed whether
  // or not a candidate fits.
  GrowStats stats;
  for (InjectionKind kind : {InjectionKind::Instantiation, InjectionKind::FunctionCall,
                             InjectionKind::HierRef}) {
    int before = engine.tokens();
    bool grew = engine.try_inject(kind, &stats);
    if (grew) {
      CHECK(engine.tokens() > before);
    } else {
      CHECK(engine.tokens() == before);
    }
    CHECK(strictly_valid(print_tree(engine.design().tree)));
  }
  CHECK(stats.injections == stats.gate_injections + stats.module_injections +
                                stats.call_injections + stats.hier_injections);
}

TEST_CASE("instantiation injections mark pool modules consumed") {
  InjectionConfig cfg;
  cfg.token_budget = 300;
  cfg.atom.strict = true;
  cfg.w_function_call = 0.0;  // steer toward instantiation
  cfg.w_hier_ref = 0.0;
  auto r = grow_design(fixture_table(), 404, cfg);
  REQUIRE(r.ok());
  const GrownDesign& g = r.value();
  CHECK(g.stats.module_injections + g.stats.gate_injections +
            g.stats.call_injections + g.stats.hier_injections ==
        g.stats.injections);

  // Consumed entries correspond to actual instantiation edges.
  auto edges = instantiation_edges(g.typed.design);
  CHECK(static_cast<int>(edges.size()) >= g.stats.module_injections);
}

TEST_CASE("every grown design in a batch keeps the module graph acyclic") {
  InjectionConfig cfg;
  cfg.token_budget = 150;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    auto r = grow_design(fixture_table(), seed, cfg);
    REQUIRE(r.ok());
    CHECK(instantiation_acyclic(r.value().typed.design));
    auto p = parse_design(print_tree(r.value().typed.design.tree));
    CHECK(p.ok());
  }
}

TEST_CASE("an impossible stall budget surfaces as a failure value") {
  InjectionConfig cfg;
  cfg.token_budget = 1000000;
  cfg.max_iterations = 6;
  cfg.atom.strict = true;
  auto r = grow_design(fixture_table(), 8, cfg);
  REQUIRE(!r.ok());
  CHECK(!r.error().reason.empty());
  CHECK(r.error().stats.iterations >= 1);
}
