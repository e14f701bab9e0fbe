#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "vgen/parser.hpp"
#include "vgen/scope.hpp"
#include "vgen/skeleton.hpp"
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

ScopeCheck check_text(const std::string& text) {
  auto r = parse_design(text);
  REQUIRE(r.ok());
  return check_scopes(r.value());
}

NamedDesign checked(const std::string& text) {
  ScopeCheck sc = check_text(text);
  if (!sc.ok()) {
    CAPTURE(sc.violations[0].message);
    REQUIRE(sc.ok());
  }
  return std::move(*sc.design);
}

bool any_violation_contains(const ScopeCheck& sc, const std::string& needle) {
  for (const auto& v : sc.violations)
    if (v.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("the corpus fixtures pass the checker and build symbol tables") {
  NamedDesign d = checked(fixture("corpus/counter.v"));
  REQUIRE(d.modules.size() == 1);
  const ModuleInfo& m = d.modules[0];
  CHECK(m.name == "counter");
  REQUIRE(m.ports.size() == 4);
  CHECK(m.symbols[m.ports[0]].name == "clk");
  CHECK(m.symbols[m.ports[0]].dir == Direction::In);
  CHECK(m.symbols[m.ports[3]].name == "count");
  CHECK(m.symbols[m.ports[3]].dir == Direction::Out);
  const Symbol* bump = m.find("bump");
  REQUIRE(bump != nullptr);
  CHECK(bump->kind == SymKind::Net);
  const Symbol* acc = m.find("acc");
  REQUIRE(acc != nullptr);
  CHECK(acc->kind == SymKind::Var);
}

TEST_CASE("file-level parameters, structs and instances land in the tables") {
  NamedDesign d = checked(fixture("corpus/gadgets.v"));
  CHECK(d.file_params.at("WORD") == 8);
  REQUIRE(d.modules.size() == 2);
  CHECK(d.find_module("alu") != nullptr);
  CHECK(d.find_module("top") != nullptr);
  const StructInfo* pair = d.find_struct("pair_t");
  REQUIRE(pair != nullptr);
  REQUIRE(pair->members.size() == 2);
  CHECK(pair->members[0].name == "hi");
  CHECK(pair->members[0].width == 4);
  CHECK(pair->total_width() == 8);

  const ModuleInfo& top = *d.find_module("top");
  CHECK(top.params.at("NIB") == 4);   // WORD - 4, folded
  CHECK(top.params.at("WORD") == 8);  // file-level visible in the module
  const Symbol* u0 = top.find("u0");
  REQUIRE(u0 != nullptr);
  CHECK(u0->kind == SymKind::Instance);
  CHECK(u0->instance_of == "alu");
  const Symbol* pr = top.find("pr");
  REQUIRE(pr != nullptr);
  CHECK(pr->struct_instance);
  const Symbol* pick = d.find_module("alu")->find("pick");
  REQUIRE(pick != nullptr);
  CHECK(pick->kind == SymKind::Function);
  CHECK(pick->fn_arity == 2);
}

TEST_CASE("reading an undeclared name is a violation with a position") {
  ScopeCheck sc = check_text(fixture("bad/undeclared.v"));
  REQUIRE(!sc.ok());
  CHECK(any_violation_contains(sc, "undeclared"));
  CHECK(sc.violations[0].line > 0);
  CHECK(!sc.design.has_value());
}

TEST_CASE("self-referential initializers are flagged, not crashed on") {
  ScopeCheck sc = check_text(fixture("bad/self_ref.v"));
  REQUIRE(!sc.ok());
  CHECK(any_violation_contains(sc, "own initializer"));
}

TEST_CASE("family misuse is not the scope checker's business") {
  // A wire written in an always block is type-ill, but every name resolves.
  ScopeCheck sc = check_text(fixture("bad/wire_always.v"));
  CHECK(sc.ok());
}

TEST_CASE("duplicate declarations in one module are violations") {
  ScopeCheck sc = check_text("module m ; wire w ; wire w ; endmodule");
  REQUIRE(!sc.ok());
  CHECK(any_violation_contains(sc, "duplicate"));
}

TEST_CASE("use before declaration is a violation for value names") {
  ScopeCheck sc = check_text("module m ; assign a = 1'd0 ; wire a ; endmodule");
  CHECK(!sc.ok());
}

TEST_CASE("modules resolve file-wide, so forward instantiation is fine") {
  ScopeCheck sc = check_text(
      "module a ; b u0 ( ) ; endmodule\n"
      "module b ; endmodule\n");
  CHECK(sc.ok());
}

TEST_CASE("instantiating an unknown module is a violation") {
  ScopeCheck sc = check_text("module m ; nope u0 ( ) ; endmodule");
  REQUIRE(!sc.ok());
  CHECK(any_violation_contains(sc, "nope"));
}

TEST_CASE("a module instantiating itself is rejected by name") {
  ScopeCheck sc = check_text("module m ; m u0 ( ) ; endmodule");
  CHECK(!sc.ok());
}

TEST_CASE("named connections must match the callee's ports") {
  std::string lib = "module leaf ( input a , output b ) ; assign b = a ; endmodule\n";
  ScopeCheck good = check_text(
      lib + "module m ; wire x ; wire y ; leaf u ( .a ( x ) , .b ( y ) ) ; endmodule");
  CHECK(good.ok());
  ScopeCheck bad = check_text(
      lib + "module m ; wire x ; wire y ; leaf u ( .a ( x ) , .c ( y ) ) ; endmodule");
  REQUIRE(!bad.ok());
  CHECK(any_violation_contains(bad, "c"));
}

TEST_CASE("positional connection arity must match the port count") {
  std::string lib = "module leaf ( input a , output b ) ; assign b = a ; endmodule\n";
  ScopeCheck sc = check_text(lib + "module m ; wire x ; leaf u ( x ) ; endmodule");
  CHECK(!sc.ok());
}

TEST_CASE("struct member access is checked against the member table") {
  std::string lib =
      "typedef struct packed { logic [3:0] hi ; logic [3:0] lo ; } pair_t ;\n"
      "module m ; pair_t p ; reg [3:0] r ;\n";
  ScopeCheck good = check_text(lib + "always @ ( * ) r = p.hi ; endmodule");
  CHECK(good.ok());
  ScopeCheck bad = check_text(lib + "always @ ( * ) r = p.mid ; endmodule");
  REQUIRE(!bad.ok());
  CHECK(any_violation_contains(bad, "mid"));
}

TEST_CASE("localparam expressions fold, including dependent chains") {
  NamedDesign d = checked(
      "module m ;\nlocalparam A = 2 ;\nlocalparam B = A + 3 ;\n"
      "localparam [7:0] C = B - 1 ;\nwire [B-1:0] w ;\nassign w = 1'd0 ;\nendmodule");
  const ModuleInfo& m = d.modules[0];
  CHECK(m.params.at("A") == 2);
  CHECK(m.params.at("B") == 5);
  CHECK(m.params.at("C") == 4);
}

TEST_CASE("resolution replaces every placeholder deterministically") {
  auto files = load_corpus_dir(std::string(VGEN_FIXTURE_DIR) + "/corpus");
  ProbabilityTable table = train_corpus(files, 2).table;

  int resolved_count = 0;
  for (uint64_t seed = 1; seed <= 40 && resolved_count < 5; ++seed) {
    auto skel = generate_skeleton(table, seed);
    if (!skel.ok()) continue;
    Rng rng_a(seed);
    Rng rng_b(seed);
    ResolveOptions opts;
    opts.self_ref_prob = 0.0;
    auto a = resolve_scopes(skel.value().tree, rng_a, opts);
    auto b = resolve_scopes(skel.value().tree, rng_b, opts);
    REQUIRE(a.ok() == b.ok());
    if (!a.ok()) continue;
    ++resolved_count;
    CHECK(tree_equal(a.value().tree, b.value().tree));
    for (int leaf : a.value().tree.leaves()) {
      CHECK(!a.value().tree.at(leaf).placeholder);
      if (a.value().tree.at(leaf).tok.kind == Tok::identifier)
        CHECK(a.value().tree.at(leaf).tok.lexeme.rfind("id_", 0) == 0);
    }
    // What resolution produced, the checker accepts.
    ScopeCheck sc = check_scopes(a.value().tree);
    CHECK(sc.ok());
  }
  CHECK(resolved_count == 5);
}

TEST_CASE("namespace member draws respect the need") {
  NamedDesign d = checked(fixture("corpus/gadgets.v"));
  int top = d.module_by_name.at("top");
  Rng rng(7);

  // Reads can hit any value member of the instantiated module.
  std::set<std::string> reads;
  for (int i = 0; i < 64; ++i) {
    auto r = resolve_namespace_member(d, top, "u0", rng, MemberNeed::Read);
    REQUIRE(r.ok());
    reads.insert(r.value());
  }
  for (const auto& name : reads) {
    const Symbol* s = d.find_module("alu")->find(name);
    REQUIRE(s != nullptr);
    CHECK(s->kind != SymKind::Function);
  }

  // The alu has variables but no internal nets, so a net write must fail
  // while a variable write succeeds.
  auto wn = resolve_namespace_member(d, top, "u0", rng, MemberNeed::WriteNet);
  CHECK(!wn.ok());
  auto wv = resolve_namespace_member(d, top, "u0", rng, MemberNeed::WriteVar);
  REQUIRE(wv.ok());
  CHECK(wv.value() == "acc");

  // Struct variables resolve through their field table.
  auto field = resolve_namespace_member(d, top, "pr", rng, MemberNeed::Read);
  REQUIRE(field.ok());
  CHECK((field.value() == "hi" || field.value() == "lo"));
}
