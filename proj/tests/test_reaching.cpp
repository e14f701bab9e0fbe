#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "vgen/parser.hpp"
#include "vgen/reaching.hpp"
#include "vgen/rng.hpp"

using namespace vgen;

namespace {

std::string fixture(const std::string& rel) {
  std::ifstream in(std::string(VGEN_FIXTURE_DIR) + "/" + rel, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TypedDesign typed_fixture(const std::string& rel) {
  auto r = parse_design(fixture(rel));
  REQUIRE(r.ok());
  ScopeCheck sc = check_scopes(r.value());
  REQUIRE(sc.ok());
  auto td = infer(std::move(*sc.design), TypeFactMode::ConcreteDefaults);
  REQUIRE(td.ok());
  return std::move(td.value());
}

std::set<std::string> names_at(const std::vector<ReachingSym>& syms) {
  std::set<std::string> out;
  for (const auto& s : syms) out.insert(s.name);
  return out;
}

Cfg random_cfg(Rng& rng, int max_nodes) {
  Cfg cfg;
  int n = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_nodes)));
  cfg.nodes.resize(n);
  int symbols = 1 + static_cast<int>(rng.below(3));
  for (int i = 0; i < n; ++i) {
    // Sparse forward and backward edges; cycles welcome.
    int edges = static_cast<int>(rng.below(3));
    for (int e = 0; e < edges; ++e)
      cfg.nodes[i].succ.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(n))));
    int defs = static_cast<int>(rng.below(3));
    for (int d = 0; d < defs; ++d) {
      int id = static_cast<int>(cfg.def_symbol.size());
      cfg.def_symbol.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(symbols))));
      cfg.nodes[i].defs.push_back(id);
    }
  }
  return cfg;
}

}  // namespace

TEST_CASE("both definitions reach the join of a diamond") {
  // 0 -> 1 -> 3, 0 -> 2 -> 3; node 0 defines x, node 1 redefines it.
  Cfg cfg;
  cfg.nodes.resize(4);
  cfg.nodes[0].succ = {1, 2};
  cfg.nodes[1].succ = {3};
  cfg.nodes[2].succ = {3};
  cfg.nodes[0].defs = {0};
  cfg.nodes[1].defs = {1};
  cfg.def_symbol = {0, 0};

  auto in = solve_reaching(cfg);
  REQUIRE(in.size() == 4);
  CHECK(in[1] == std::vector<bool>{true, false});   // only the entry def
  CHECK(in[2] == std::vector<bool>{true, false});
  CHECK(in[3] == std::vector<bool>{true, true});    // one along each arm
  CHECK(in[0] == std::vector<bool>{false, false});  // nothing reaches entry
}

TEST_CASE("a later definition in the same node supersedes an earlier one") {
  Cfg cfg;
  cfg.nodes.resize(2);
  cfg.nodes[0].succ = {1};
  cfg.nodes[0].defs = {0, 1};  // both define symbol 0, in order
  cfg.def_symbol = {0, 0};
  auto in = solve_reaching(cfg);
  CHECK(in[1] == std::vector<bool>{false, true});
}

TEST_CASE("definitions flow around a loop") {
  // 0 -> 1 -> 2 -> 1: the def in 2 reaches 1 on the second pass.
  Cfg cfg;
  cfg.nodes.resize(3);
  cfg.nodes[0].succ = {1};
  cfg.nodes[1].succ = {2};
  cfg.nodes[2].succ = {1};
  cfg.nodes[0].defs = {0};
  cfg.nodes[2].defs = {1};
  cfg.def_symbol = {0, 0};
  auto in = solve_reaching(cfg);
  CHECK(in[1] == std::vector<bool>{true, true});
  CHECK(in[2] == std::vector<bool>{true, false});  // killed in 1? no: 1 has no defs
}

TEST_CASE("a kill on every path stops a definition") {
  // 0 -> 1 -> 2; 1 redefines, so node 2 sees only the newer def.
  Cfg cfg;
  cfg.nodes.resize(3);
  cfg.nodes[0].succ = {1};
  cfg.nodes[1].succ = {2};
  cfg.nodes[0].defs = {0};
  cfg.nodes[1].defs = {1};
  cfg.def_symbol = {0, 0};
  auto in = solve_reaching(cfg);
  CHECK(in[2] == std::vector<bool>{false, true});
  // The redefining node itself still sees the incoming def at its start.
  CHECK(in[1] == std::vector<bool>{true, false});
}

TEST_CASE("unreachable nodes receive nothing") {
  Cfg cfg;
  cfg.nodes.resize(3);
  cfg.nodes[0].succ = {1};
  cfg.nodes[0].defs = {0};
  cfg.def_symbol = {0};
  // Node 2 has no predecessors.
  auto in = solve_reaching(cfg);
  CHECK(in[2] == std::vector<bool>{false});
}

TEST_CASE("the worklist solution matches path enumeration on random graphs") {
  Rng rng(0x5eedu);
  for (int trial = 0; trial < 300; ++trial) {
    Cfg cfg = random_cfg(rng, 8);
    CAPTURE(trial);
    CHECK(solve_reaching(cfg) == enumerate_reaching(cfg));
  }
}

TEST_CASE("the module map exposes symbols at item boundaries") {
  TypedDesign td = typed_fixture("corpus/counter.v");
  ModuleReaching mr = reaching_map(td, 0);

  // counter has 8 items; one boundary before each plus the end.
  REQUIRE(mr.at_boundary.size() == 9);

  // Before the first item only the ports have definitions (at entry).
  CHECK(names_at(mr.at_boundary[0]) ==
        std::set<std::string>{"clk", "rst", "step", "count"});

  // After the three declarations the new names are visible.
  std::set<std::string> after_decls = names_at(mr.at_boundary[3]);
  CHECK(after_decls.count("bump") == 1);
  CHECK(after_decls.count("cnet") == 1);
  CHECK(after_decls.count("acc") == 1);

  // The end-of-module boundary sees everything.
  CHECK(names_at(mr.at_boundary[8]).size() == 7);

  // Types ride along with the symbols.
  for (const auto& s : mr.at_boundary[8]) {
    if (s.name == "bump") {
      CHECK(s.type == ConcreteType{Family::Net, 9, false});
      CHECK(s.kind == SymKind::Net);
    }
    if (s.name == "count") {
      CHECK(s.dir == Direction::Out);
      CHECK(s.type.family == Family::Var);
    }
  }

  // Statement-level entries exist for the procedural bodies and see the
  // module-level names.
  REQUIRE(!mr.at_statement.empty());
  for (const auto& [node, syms] : mr.at_statement) {
    CHECK(td.design.tree.lhs_of(node) == NT::Statement);
    CHECK(names_at(syms).count("step") == 1);
  }
}

TEST_CASE("boundary symbols never include names declared later") {
  TypedDesign td = typed_fixture("corpus/gadgets.v");
  int top = td.design.module_by_name.at("top");
  ModuleReaching mr = reaching_map(td, top);
  // "seen" is declared by item 8 (0-based) of top; at boundary 1 it is
  // not yet a symbol with any definition.
  std::set<std::string> early = names_at(mr.at_boundary[1]);
  CHECK(early.count("seen") == 0);
  CHECK(early.count("pad") == 1);  // ports define at entry
  // By the end it is there.
  CHECK(names_at(mr.at_boundary.back()).count("seen") == 1);
}

TEST_CASE("instance output connections define the connected symbol") {
  TypedDesign td = typed_fixture("corpus/gadgets.v");
  int top = td.design.module_by_name.at("top");
  const Tree& tree = td.design.tree;
  // Find the item index of instance u0 by walking top's item list.
  int items_node = -1;
  {
    int mod = td.design.modules[top].node;
    items_node = tree.at(mod).kids[4];
  }
  int idx = 0;
  int u0_idx = -1;
  for (int cell = items_node; !tree.at(cell).kids.empty();
       cell = tree.at(cell).kids[1], ++idx) {
    int item = tree.at(cell).kids[0];
    int inner = tree.at(item).kids[0];
    if (!tree.is_leaf(inner) && tree.lhs_of(inner) == NT::InstOrStructDecl) {
      std::string head = tree.at(tree.at(inner).kids[1]).tok.lexeme;
      if (head == "u0") {
        u0_idx = idx;
        break;
      }
    }
  }
  REQUIRE(u0_idx >= 0);

  ModuleReaching mr = reaching_map(td, top);
  // u0r is declared before the instance and redefined by its .r connection;
  // it must be visible on both sides of the instance boundary.
  CHECK(names_at(mr.at_boundary[u0_idx]).count("u0r") == 1);
  CHECK(names_at(mr.at_boundary[u0_idx + 1]).count("u0r") == 1);
}
