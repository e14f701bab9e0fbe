#include "vgen/tree.hpp"

#include <cassert>
#include <cstdio>
#include <cstdlib>

namespace vgen {

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  if (root < 0) return out;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const Node& n = nodes_[i];
    if (n.rule < 0) {
      out.push_back(i);
      continue;
    }
    for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

int Tree::leaf_count() const { return static_cast<int>(leaves().size()); }

namespace {

bool newline_after(Tok t) {
  switch (t) {
    case Tok::semicolon:
    case Tok::kw_begin:
    case Tok::kw_end:
    case Tok::kw_endmodule:
    case Tok::kw_endcase:
    case Tok::kw_endfunction:
      return true;
    default:
      return false;
  }
}

bool no_space_before(Tok t) { return t == Tok::semicolon || t == Tok::comma; }

std::string print_impl(const Tree& t, bool annotate) {
  std::string out;
  bool line_start = true;
  // Type-slot annotations attach to the node that owns the slot; emit them
  // just before that node's first following leaf.  Walk the tree directly so
  // slot positions are known.
  struct Frame {
    int node;
    size_t next_kid;
  };
  std::vector<Frame> stack;
  if (t.root >= 0) stack.push_back({t.root, 0});
  auto emit = [&](const std::string& s, Tok kind) {
    if (!line_start && !no_space_before(kind)) out += ' ';
    out += s;
    line_start = false;
    if (newline_after(kind)) {
      out += '\n';
      line_start = true;
    }
  };
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Node& n = t.at(f.node);
    if (n.rule < 0) {
      emit(n.tok.lexeme, n.tok.kind);
      stack.pop_back();
      continue;
    }
    if (annotate && f.next_kid == 0 && n.ph_ord >= 0) {
      // Open type slot: show where it sits.
      if (!line_start) out += ' ';
      out += "/* TYPE_" + std::to_string(n.ph_ord) + " */";
      line_start = false;
    }
    if (f.next_kid >= n.kids.size()) {
      stack.pop_back();
      continue;
    }
    int kid = n.kids[f.next_kid++];
    stack.push_back({kid, 0});
  }
  if (!line_start) out += '\n';
  return out;
}

}  // namespace

std::string print_tree(const Tree& t) { return print_impl(t, false); }
std::string print_tree_annotated(const Tree& t) { return print_impl(t, true); }

bool tree_equal(const Tree& a, const Tree& b) {
  struct Pair {
    int ia, ib;
  };
  if ((a.root < 0) != (b.root < 0)) return false;
  if (a.root < 0) return true;
  std::vector<Pair> stack{{a.root, b.root}};
  while (!stack.empty()) {
    auto [ia, ib] = stack.back();
    stack.pop_back();
    const Node& na = a.at(ia);
    const Node& nb = b.at(ib);
    if (na.rule != nb.rule) return false;
    if (na.rule < 0) {
      if (na.tok.kind != nb.tok.kind || na.tok.lexeme != nb.tok.lexeme) return false;
      continue;
    }
    if (na.kids.size() != nb.kids.size()) return false;
    for (size_t i = 0; i < na.kids.size(); ++i)
      stack.push_back({na.kids[i], nb.kids[i]});
  }
  return true;
}

int TreeBuilder::leaf(Tok kind, std::string lexeme) {
  Token tok;
  tok.kind = kind;
  tok.lexeme = std::move(lexeme);
  return t_.add_leaf(std::move(tok));
}

int TreeBuilder::node(int rule, std::vector<int> kids) {
#ifndef NDEBUG
  const Rule& r = Grammar::get().rule(rule);
  assert(kids.size() == r.rhs.size());
  for (size_t i = 0; i < kids.size(); ++i) {
    const Node& k = t_.at(kids[i]);
    if (r.rhs[i].terminal)
      assert(k.rule < 0 && k.tok.kind == r.rhs[i].tok());
    else
      assert(k.rule >= 0 && Grammar::get().rule(k.rule).lhs == r.rhs[i].nt());
  }
#endif
  int id = t_.add_node(rule);
  t_.at(id).kids.assign(kids.begin(), kids.end());
  return id;
}

int find_rule(NT lhs, const std::vector<Sym>& rhs) {
  const Grammar& g = Grammar::get();
  for (int id : g.rules_for(lhs))
    if (g.rule(id).rhs == rhs) return id;
  std::fprintf(stderr, "find_rule: no %s rule with the requested shape\n", nt_name(lhs));
  std::abort();
}

namespace {

// Cached rule ids for the builder composites.
struct ChainRules {
  int expr, ternary, tt_eps, lor, lor_eps, land, land_eps, bor, bor_eps, xr, xr_eps,
      band, band_eps, eq, eq_eps, rel, rel_eps, shift, shift_eps, add, add_eps, mul,
      mul_eps, unary_primary, primary_id, ptail_eps, ptail_dot, lv, lvt_eps, lvt_dot;
  ChainRules() {
    expr = find_rule(NT::Expression, {N(NT::Ternary)});
    ternary = find_rule(NT::Ternary, {N(NT::LorExpr), N(NT::TernaryTail)});
    tt_eps = find_rule(NT::TernaryTail, {});
    lor = find_rule(NT::LorExpr, {N(NT::LandExpr), N(NT::LorTail)});
    lor_eps = find_rule(NT::LorTail, {});
    land = find_rule(NT::LandExpr, {N(NT::BorExpr), N(NT::LandTail)});
    land_eps = find_rule(NT::LandTail, {});
    bor = find_rule(NT::BorExpr, {N(NT::XorExpr), N(NT::BorTail)});
    bor_eps = find_rule(NT::BorTail, {});
    xr = find_rule(NT::XorExpr, {N(NT::BandExpr), N(NT::XorTail)});
    xr_eps = find_rule(NT::XorTail, {});
    band = find_rule(NT::BandExpr, {N(NT::EqExpr), N(NT::BandTail)});
    band_eps = find_rule(NT::BandTail, {});
    eq = find_rule(NT::EqExpr, {N(NT::RelExpr), N(NT::EqTail)});
    eq_eps = find_rule(NT::EqTail, {});
    rel = find_rule(NT::RelExpr, {N(NT::ShiftExpr), N(NT::RelTail)});
    rel_eps = find_rule(NT::RelTail, {});
    shift = find_rule(NT::ShiftExpr, {N(NT::AddExpr), N(NT::ShiftTail)});
    shift_eps = find_rule(NT::ShiftTail, {});
    add = find_rule(NT::AddExpr, {N(NT::MulExpr), N(NT::AddTail)});
    add_eps = find_rule(NT::AddTail, {});
    mul = find_rule(NT::MulExpr, {N(NT::UnaryExpr), N(NT::MulTail)});
    mul_eps = find_rule(NT::MulTail, {});
    unary_primary = find_rule(NT::UnaryExpr, {N(NT::Primary)});
    primary_id = find_rule(NT::Primary, {T(Tok::identifier), N(NT::PrimaryTail)});
    ptail_eps = find_rule(NT::PrimaryTail, {});
    ptail_dot = find_rule(NT::PrimaryTail, {T(Tok::dot), T(Tok::identifier)});
    lv = find_rule(NT::LValue, {T(Tok::identifier), N(NT::LValueTail)});
    lvt_eps = find_rule(NT::LValueTail, {});
    lvt_dot = find_rule(NT::LValueTail, {T(Tok::dot), T(Tok::identifier)});
  }
};

const ChainRules& chain() {
  static const ChainRules c;
  return c;
}

}  // namespace

int TreeBuilder::wrap_primary_to_expression(int primary_node) {
  const ChainRules& c = chain();
  int u = node(c.unary_primary, {primary_node});
  int m = node(c.mul, {u, node(c.mul_eps, {})});
  int a = node(c.add, {m, node(c.add_eps, {})});
  int sh = node(c.shift, {a, node(c.shift_eps, {})});
  int r = node(c.rel, {sh, node(c.rel_eps, {})});
  int e = node(c.eq, {r, node(c.eq_eps, {})});
  int b = node(c.band, {e, node(c.band_eps, {})});
  int x = node(c.xr, {b, node(c.xr_eps, {})});
  int bo = node(c.bor, {x, node(c.bor_eps, {})});
  int la = node(c.land, {bo, node(c.land_eps, {})});
  int lo = node(c.lor, {la, node(c.lor_eps, {})});
  int te = node(c.ternary, {lo, node(c.tt_eps, {})});
  return node(c.expr, {te});
}

int TreeBuilder::ident_expression(const std::string& name) {
  const ChainRules& c = chain();
  int p = node(c.primary_id, {identifier(name), node(c.ptail_eps, {})});
  return wrap_primary_to_expression(p);
}

int TreeBuilder::hier_expression(const std::string& base, const std::string& member) {
  const ChainRules& c = chain();
  int tail = node(c.ptail_dot, {leaf(Tok::dot), identifier(member)});
  int p = node(c.primary_id, {identifier(base), tail});
  return wrap_primary_to_expression(p);
}

int TreeBuilder::lvalue(const std::string& name) {
  const ChainRules& c = chain();
  return node(c.lv, {identifier(name), node(c.lvt_eps, {})});
}

int TreeBuilder::hier_lvalue(const std::string& base, const std::string& member) {
  const ChainRules& c = chain();
  int tail = node(c.lvt_dot, {leaf(Tok::dot), identifier(member)});
  return node(c.lv, {identifier(base), tail});
}

}  // namespace vgen
