#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "vgen/grammar.hpp"

using namespace vgen;

TEST_CASE("grammar shape is stable") {
  const Grammar& g = Grammar::get();
  // Serialized tables key on rule ids, so the rule inventory must not drift.
  CHECK(g.rule_count() == 193);
  CHECK(kNTCount == 99);
  CHECK(g.version() == "mini-verilog-1");
  CHECK(g.start() == NT::Source);
}

TEST_CASE("rule ids equal their index and lhs indexing is consistent") {
  const Grammar& g = Grammar::get();
  for (int i = 0; i < g.rule_count(); ++i) {
    const Rule& r = g.rule(i);
    CHECK(r.id == i);
    bool listed = false;
    for (int cand : g.rules_for(r.lhs)) listed |= (cand == i);
    CHECK(listed);
  }
  int total = 0;
  for (int nt = 0; nt < kNTCount; ++nt) {
    const auto& alts = g.rules_for(static_cast<NT>(nt));
    CHECK(!alts.empty());  // every nonterminal is productive
    for (int id : alts) CHECK(g.rule(id).lhs == static_cast<NT>(nt));
    total += static_cast<int>(alts.size());
  }
  CHECK(total == g.rule_count());
}

TEST_CASE("nonterminal names round-trip") {
  for (int i = 0; i < kNTCount; ++i) {
    NT nt = static_cast<NT>(i);
    std::string n = nt_name(nt);
    CHECK(!n.empty());
    CHECK(nt_from_name(n) == nt);
  }
}

TEST_CASE("nullability matches the obvious cases") {
  const Grammar& g = Grammar::get();
  CHECK(g.nullable(NT::ItemList));
  CHECK(g.nullable(NT::DescriptionList));
  CHECK(g.nullable(NT::PortListOpt));
  CHECK(g.nullable(NT::ElseOpt));
  CHECK(!g.nullable(NT::ModuleDecl));
  CHECK(!g.nullable(NT::Expression));
  CHECK(!g.nullable(NT::Statement));
}

TEST_CASE("prediction agrees with first sets") {
  const Grammar& g = Grammar::get();
  for (int i = 0; i < g.rule_count(); ++i) {
    const Rule& r = g.rule(i);
    // Terminals that can begin this rule's expansion must predict it, except
    // where the dangling-else rule deliberately prefers the consuming form.
    std::set<Tok> first;
    bool all_nullable = true;
    for (const Sym& s : r.rhs) {
      if (s.terminal) {
        if (all_nullable) first.insert(s.tok());
        all_nullable = false;
        break;
      }
      if (all_nullable) {
        const auto& f = g.first(s.nt());
        for (int ti = 0; ti < kTokCount; ++ti)
          if (f[ti]) first.insert(static_cast<Tok>(ti));
      }
      if (!g.nullable(s.nt())) {
        all_nullable = false;
        break;
      }
    }
    for (Tok t : first) {
      if (r.lhs == NT::ElseOpt && t == Tok::kw_else && r.rhs.empty()) continue;
      CAPTURE(i);
      CAPTURE(tok_name(t));
      CHECK(g.predict(r.lhs, t) == i);
    }
  }
}

TEST_CASE("prediction falls back to the nullable alternative on follow tokens") {
  const Grammar& g = Grammar::get();
  // endmodule can follow an item list, so ItemList must predict its empty rule.
  int r = g.predict(NT::ItemList, Tok::kw_endmodule);
  REQUIRE(r >= 0);
  CHECK(g.rule(r).rhs.empty());
  // A semicolon after an else-less if resolves ElseOpt to empty...
  r = g.predict(NT::ElseOpt, Tok::kw_endmodule);
  REQUIRE(r >= 0);
  CHECK(g.rule(r).rhs.empty());
  // ...but an actual else attaches to the nearest if.
  r = g.predict(NT::ElseOpt, Tok::kw_else);
  REQUIRE(r >= 0);
  CHECK(!g.rule(r).rhs.empty());
}

TEST_CASE("prediction rejects impossible pairs") {
  const Grammar& g = Grammar::get();
  CHECK(g.predict(NT::ModuleDecl, Tok::kw_wire) == -1);
  CHECK(g.predict(NT::Expression, Tok::semicolon) == -1);
  CHECK(g.predict(NT::Statement, Tok::kw_endmodule) == -1);
}

TEST_CASE("expected_tokens lists exactly the predictable starts") {
  const Grammar& g = Grammar::get();
  auto expected = g.expected_tokens(NT::Direction);
  std::set<Tok> got(expected.begin(), expected.end());
  CHECK(got == std::set<Tok>{Tok::kw_input, Tok::kw_output, Tok::kw_inout});
  for (int nt = 0; nt < kNTCount; ++nt) {
    for (Tok t : g.expected_tokens(static_cast<NT>(nt))) {
      CHECK(g.predict(static_cast<NT>(nt), t) >= 0);
    }
  }
}

TEST_CASE("alternative counts for the fan-out points") {
  const Grammar& g = Grammar::get();
  CHECK(g.rules_for(NT::Item).size() == 9);
  CHECK(g.rules_for(NT::Primary).size() == 5);
  CHECK(g.rules_for(NT::GateType).size() == 8);
  CHECK(g.rules_for(NT::Statement).size() == 4);
  CHECK(g.rules_for(NT::Description).size() == 3);
}

TEST_CASE("find_rule locates rules by shape") {
  int r = find_rule(NT::ConstTerm, {T(Tok::number)});
  CHECK(Grammar::get().rule(r).lhs == NT::ConstTerm);
  int r2 = find_rule(NT::ItemList, {});
  CHECK(Grammar::get().rule(r2).rhs.empty());
}
