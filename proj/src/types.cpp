#include "vgen/types.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "vgen/walk_util.hpp"

namespace vgen {

std::string pattern_to_string(const TypePattern& p) {
  std::ostringstream os;
  os << "{";
  os << (p.family ? (*p.family == Family::Net ? "net" : "var") : "_");
  os << ",";
  if (p.width) {
    os << *p.width;
  } else {
    os << "_";
  }
  os << ",";
  os << (p.is_signed ? (*p.is_signed ? "signed" : "unsigned") : "_");
  os << "}";
  return os.str();
}

// --- constant folding -------------------------------------------------------

namespace {

std::optional<int64_t> fold_node(const Tree& t, int node,
                                 const std::map<std::string, int64_t>& params);

std::optional<int64_t> fold_leaf_number(const Tree& t, int leaf) {
  const std::string& lx = wlex(t, leaf);
  try {
    return std::stoll(lx);
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<int64_t> fold_sized(const Tree& t, int leaf) {
  // w'<base>digits
  const std::string& lx = wlex(t, leaf);
  size_t tick = lx.find('\'');
  if (tick == std::string::npos || tick + 2 > lx.size()) return std::nullopt;
  char base = static_cast<char>(std::tolower(lx[tick + 1]));
  int radix = base == 'b' ? 2 : base == 'o' ? 8 : base == 'd' ? 10 : 16;
  int64_t v = 0;
  for (size_t i = tick + 2; i < lx.size(); ++i) {
    char c = lx[i];
    if (c == '_') continue;
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else {
      d = 10 + (std::tolower(c) - 'a');
    }
    if (d >= radix) return std::nullopt;
    v = v * radix + d;
  }
  return v;
}

std::optional<int64_t> fold_param(const std::string& name,
                                  const std::map<std::string, int64_t>& params) {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

// ConstExpr / ConstExprTail / ConstTerm shapes.
std::optional<int64_t> fold_const_expr(const Tree& t, int node,
                                       const std::map<std::string, int64_t>& params) {
  int term = wkid(t, node, 0);
  std::optional<int64_t> acc;
  if (walt(t, term) == 0) {
    acc = fold_leaf_number(t, wkid(t, term, 0));
  } else {
    acc = fold_param(wlex(t, wkid(t, term, 0)), params);
  }
  if (!acc) return std::nullopt;
  int tail = wkid(t, node, 1);
  while (walt(t, tail) != 2) {
    bool plus = walt(t, tail) == 0;
    int nt = wkid(t, tail, 1);
    std::optional<int64_t> v;
    if (walt(t, nt) == 0) {
      v = fold_leaf_number(t, wkid(t, nt, 0));
    } else {
      v = fold_param(wlex(t, wkid(t, nt, 0)), params);
    }
    if (!v) return std::nullopt;
    acc = plus ? *acc + *v : *acc - *v;
    tail = wkid(t, tail, 2);
  }
  return acc;
}

// Expression-ladder shapes restricted to the constant subset: +/- chains of
// (possibly parenthesized or negated) literals and parameters.
std::optional<int64_t> fold_expression(const Tree& t, int node,
                                       const std::map<std::string, int64_t>& params) {
  int ternary = wkid(t, node, 0);
  if (walt(t, wkid(t, ternary, 1)) == 0) return std::nullopt;
  int cur = wkid(t, ternary, 0);  // LorExpr
  // Descend through single-operand levels until AddExpr.
  while (wlhs(t, cur) != NT::AddExpr) {
    int tail = wkid(t, cur, 1);
    int empty_alt = static_cast<int>(Grammar::get().rules_for(wlhs(t, tail)).size()) - 1;
    if (walt(t, tail) != empty_alt) return std::nullopt;
    cur = wkid(t, cur, 0);
  }
  // AddExpr: MulExpr (+|- MulExpr)*
  auto fold_mul = [&](int mul) -> std::optional<int64_t> {
    int tail = wkid(t, mul, 1);
    if (walt(t, tail) != 3) return std::nullopt;  // * / % not constant here
    int unary = wkid(t, mul, 0);
    int sign = 1;
    while (walt(t, unary) != 6) {
      if (walt(t, unary) != 2) return std::nullopt;  // only unary minus
      sign = -sign;
      unary = wkid(t, unary, 1);
    }
    int prim = wkid(t, unary, 0);
    std::optional<int64_t> v;
    switch (walt(t, prim)) {
      case 0: {  // identifier (must be a parameter, tail must be empty)
        if (walt(t, wkid(t, prim, 1)) != 3) return std::nullopt;
        v = fold_param(wlex(t, wkid(t, prim, 0)), params);
        break;
      }
      case 1: v = fold_leaf_number(t, wkid(t, prim, 0)); break;
      case 2: v = fold_sized(t, wkid(t, prim, 0)); break;
      case 3: v = fold_node(t, wkid(t, prim, 1), params); break;
      default: return std::nullopt;
    }
    if (!v) return std::nullopt;
    return sign * *v;
  };
  std::optional<int64_t> acc = fold_mul(wkid(t, cur, 0));
  if (!acc) return std::nullopt;
  int tail = wkid(t, cur, 1);
  while (walt(t, tail) != 2) {
    bool plus = walt(t, tail) == 0;
    auto v = fold_mul(wkid(t, tail, 1));
    if (!v) return std::nullopt;
    acc = plus ? *acc + *v : *acc - *v;
    tail = wkid(t, tail, 2);
  }
  return acc;
}

std::optional<int64_t> fold_node(const Tree& t, int node,
                                 const std::map<std::string, int64_t>& params) {
  NT nt = wlhs(t, node);
  if (nt == NT::ConstExpr) return fold_const_expr(t, node, params);
  if (nt == NT::Expression) return fold_expression(t, node, params);
  return std::nullopt;
}

}  // namespace

std::optional<int64_t> fold_const_subtree(const Tree& tree, int node,
                                          const std::map<std::string, int64_t>& params) {
  return fold_node(tree, node, params);
}

// --- constraint generation --------------------------------------------------

namespace {

const TypePattern kWidth1{std::nullopt, 1, false};

class ConstraintWalker {
 public:
  ConstraintWalker(const NamedDesign& d, TypeFactMode mode) : d_(d), mode_(mode) {}

  ConstraintSet take() && { return std::move(set_); }

  void run() {
    for (int m = 0; m < static_cast<int>(d_.modules.size()); ++m) {
      cur_ = m;
      declare_symbol_tvars();
    }
    for (int m = 0; m < static_cast<int>(d_.modules.size()); ++m) {
      cur_ = m;
      walk_items();
    }
  }

 private:
  const NamedDesign& d_;
  TypeFactMode mode_;
  ConstraintSet set_;
  int cur_ = -1;

  bool in_fn_ = false;
  std::string fn_name_;
  int fn_ret_tvar_ = -1;
  std::map<std::string, int> fn_port_tvars_;

  const Tree& t() const { return d_.tree; }
  const ModuleInfo& mod() const { return d_.modules[cur_]; }

  int kid(int n, int i) const { return wkid(t(), n, i); }
  int alt(int n) const { return walt(t(), n); }
  NT lhs(int n) const { return wlhs(t(), n); }
  const std::string& lex(int leaf) const { return wlex(t(), leaf); }

  void error_at(int node, std::string msg) {
    TypeError e;
    e.message = std::move(msg);
    wpos(t(), node, &e.line, &e.col);
    set_.errors.push_back(std::move(e));
  }

  void eq_vv(int a, int b, int node) {
    Constraint c;
    c.kind = Constraint::Kind::EqVarVar;
    c.a = a;
    c.b = b;
    wpos(t(), node, &c.line, &c.col);
    set_.constraints.push_back(std::move(c));
  }

  void eq_vp(int a, TypePattern p, int node) {
    Constraint c;
    c.kind = Constraint::Kind::EqVarPat;
    c.a = a;
    c.pat = std::move(p);
    wpos(t(), node, &c.line, &c.col);
    set_.constraints.push_back(std::move(c));
  }

  void cond(int antecedent, int dest, CondForm form, int node, int antecedent2 = -1) {
    Constraint c;
    c.kind = Constraint::Kind::Cond;
    c.a = antecedent;
    c.b = antecedent2;
    c.dest = dest;
    c.form = form;
    wpos(t(), node, &c.line, &c.col);
    set_.constraints.push_back(std::move(c));
  }

  void famreq(int tvar, Family f, const char* origin, int node) {
    FamilyRequirement r;
    r.tvar = tvar;
    r.required = f;
    r.origin = origin;
    wpos(t(), node, &r.line, &r.col);
    set_.family_reqs.push_back(std::move(r));
  }

  std::optional<int64_t> fold(int node) const {
    return fold_const_subtree(t(), node, mod().params);
  }

  // --- declaration facts ----------------------------------------------------

  std::optional<int> fold_range_width(int range_opt, bool* bad, int* bad_node) {
    *bad = false;
    if (alt(range_opt) != 0) return std::nullopt;
    int range = kid(range_opt, 0);
    auto msb = fold(kid(range, 1));
    auto lsb = fold(kid(range, 3));
    if (!msb || !lsb) {
      *bad = true;
      *bad_node = range;
      error_at(range, "range bounds are not constant");
      return std::nullopt;
    }
    if (*msb < *lsb) {
      *bad = true;
      *bad_node = range;
      error_at(range, "range is reversed");
      return std::nullopt;
    }
    return static_cast<int>(*msb - *lsb + 1);
  }

  // Facts contributed by a SignedOpt/RangeOpt pair on an open-type slot
  // (ports, function returns).  `explicit_family` carries the keyword when
  // present.
  TypePattern open_slot_pattern(int signed_opt, int range_opt,
                                std::optional<Family> explicit_family) {
    TypePattern p;
    bool bad = false;
    int bad_node = -1;
    auto w = fold_range_width(range_opt, &bad, &bad_node);
    if (explicit_family) {
      p.family = explicit_family;
    } else if (mode_ == TypeFactMode::ConcreteDefaults) {
      p.family = Family::Net;
    }
    if (w) {
      p.width = *w;
    } else if (!bad && mode_ == TypeFactMode::ConcreteDefaults) {
      p.width = 1;
    }
    if (alt(signed_opt) == 0) {
      p.is_signed = true;
    } else if (mode_ == TypeFactMode::ConcreteDefaults) {
      p.is_signed = false;
    }
    return p;
  }

  TypePattern port_pattern(int port_type) {
    int a = alt(port_type);
    std::optional<Family> fam;
    int signed_opt, range_opt;
    if (a == 0) {
      int kw = kid(port_type, 0);
      fam = walt(t(), kw) == 0 ? Family::Net : Family::Var;
      signed_opt = kid(port_type, 1);
      range_opt = kid(port_type, 2);
    } else {
      signed_opt = kid(port_type, 0);
      range_opt = kid(port_type, 1);
    }
    return open_slot_pattern(signed_opt, range_opt, fam);
  }

  // Item-level declarations commit fully in both modes.
  TypePattern item_decl_pattern(int decl_node, Family fam) {
    TypePattern p;
    p.family = fam;
    p.is_signed = alt(kid(decl_node, 1)) == 0;
    bool bad = false;
    int bad_node = -1;
    auto w = fold_range_width(kid(decl_node, 2), &bad, &bad_node);
    p.width = w ? *w : 1;
    if (bad) p.width = std::nullopt;  // error already recorded
    return p;
  }

  void declare_symbol_tvars() {
    const ModuleInfo& m = mod();
    for (const Symbol& s : m.symbols) {
      switch (s.kind) {
        case SymKind::Net:
        case SymKind::Var: {
          int tv = set_.fresh();
          set_.symbol_tvars[{cur_, s.name}] = tv;
          TypePattern p = item_decl_pattern(s.decl_node, s.kind == SymKind::Net
                                                             ? Family::Net
                                                             : Family::Var);
          eq_vp(tv, std::move(p), s.decl_node);
          break;
        }
        case SymKind::Port: {
          int tv = set_.fresh();
          set_.symbol_tvars[{cur_, s.name}] = tv;
          TypePattern p = port_pattern(kid(s.decl_node, 1));
          if (p.family || p.width || p.is_signed) eq_vp(tv, std::move(p), s.decl_node);
          break;
        }
        case SymKind::Instance: {
          if (!s.struct_instance) break;
          const StructInfo* st = d_.find_struct(s.instance_of);
          int tv = set_.fresh();
          set_.symbol_tvars[{cur_, s.name}] = tv;
          TypePattern p;
          p.family = Family::Var;
          p.width = st ? st->total_width() : 1;
          p.is_signed = false;
          eq_vp(tv, std::move(p), s.decl_node);
          break;
        }
        case SymKind::Function: {
          int ret = set_.fresh();
          set_.return_tvars[{cur_, s.name}] = ret;
          // function SignedOpt RangeOpt id ( ports ) ...
          TypePattern p = open_slot_pattern(kid(s.decl_node, 1), kid(s.decl_node, 2),
                                            Family::Var);
          if (p.family || p.width || p.is_signed) eq_vp(ret, std::move(p), s.decl_node);
          int fpo = kid(s.decl_node, 5);
          if (alt(fpo) == 0) {
            int list = kid(fpo, 0);
            int fp = kid(list, 0);
            int tail = kid(list, 1);
            for (;;) {
              int tv = set_.fresh();
              set_.symbol_tvars[{cur_, s.name + "." + lex(kid(fp, 2))}] = tv;
              TypePattern pp = port_pattern(kid(fp, 1));
              if (pp.family || pp.width || pp.is_signed) eq_vp(tv, std::move(pp), fp);
              if (alt(tail) != 0) break;
              fp = kid(tail, 1);
              tail = kid(tail, 2);
            }
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // --- symbol reference -> tvar (or none: free position) --------------------

  std::optional<int> tvar_of_name(const std::string& name) {
    if (in_fn_) {
      if (name == fn_name_) return fn_ret_tvar_;
      auto it = fn_port_tvars_.find(name);
      if (it != fn_port_tvars_.end()) return it->second;
      return std::nullopt;  // parameter or the like: free
    }
    auto it = set_.symbol_tvars.find({cur_, name});
    if (it != set_.symbol_tvars.end()) return it->second;
    return std::nullopt;
  }

  // --- item walks -----------------------------------------------------------

  void walk_items() {
    int items = kid(mod().node, 4);
    while (alt(items) == 0) {
      walk_item(kid(items, 0));
      items = kid(items, 1);
    }
  }

  void walk_item(int node) {
    int inner = kid(node, 0);
    switch (alt(node)) {
      case 0: walk_decl_inits(inner); break;
      case 1: walk_decl_inits(inner); break;
      case 2: break;  // localparam: folded already
      case 3: {       // assign LValue = Expression ;
        int ch = set_.fresh();
        walk_lvalue(kid(inner, 1), ch, Family::Net, "continuous assignment");
        walk_expr(kid(inner, 3), ch);
        break;
      }
      case 4: walk_statement(kid(inner, 5)); break;  // always
      case 5: walk_statement(kid(inner, 1)); break;  // initial
      case 6: walk_function(inner); break;
      case 7: walk_gate(inner); break;
      default: walk_instance(inner); break;
    }
  }

  void walk_decl_inits(int node) {
    int list = kid(node, 3);
    int declr = kid(list, 0);
    int tail = kid(list, 1);
    for (;;) {
      int init_opt = kid(declr, 1);
      if (alt(init_opt) == 0) {
        int ch = set_.fresh();
        auto tv = tvar_of_name(lex(kid(declr, 0)));
        if (tv) eq_vv(ch, *tv, declr);
        walk_expr(kid(init_opt, 1), ch);
      }
      if (alt(tail) != 0) break;
      declr = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  void walk_function(int node) {
    const std::string& name = lex(kid(node, 3));
    in_fn_ = true;
    fn_name_ = name;
    fn_ret_tvar_ = set_.return_tvars.at({cur_, name});
    fn_port_tvars_.clear();
    int fpo = kid(node, 5);
    if (alt(fpo) == 0) {
      int list = kid(fpo, 0);
      int fp = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        const std::string& pn = lex(kid(fp, 2));
        fn_port_tvars_[pn] = set_.symbol_tvars.at({cur_, name + "." + pn});
        if (alt(tail) != 0) break;
        fp = kid(tail, 1);
        tail = kid(tail, 2);
      }
    }
    walk_statement(kid(node, 8));
    in_fn_ = false;
    fn_name_.clear();
    fn_ret_tvar_ = -1;
    fn_port_tvars_.clear();
  }

  void walk_gate(int node) {
    // GateType id ( LValue , ExpressionList ) ;  -- one-bit pins.
    int out = set_.fresh();
    walk_lvalue(kid(node, 3), out, Family::Net, "gate output");
    eq_vp(out, TypePattern{std::nullopt, 1, std::nullopt}, kid(node, 3));
    int list = kid(node, 5);
    int expr = kid(list, 0);
    int tail = kid(list, 1);
    for (;;) {
      int pin = set_.fresh();
      walk_expr(expr, pin);
      eq_vp(pin, TypePattern{std::nullopt, 1, std::nullopt}, expr);
      if (alt(tail) != 0) break;
      expr = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  void walk_instance(int node) {
    const Symbol* inst = mod().find(lex(kid(node, 1)));
    if (!inst || inst->struct_instance || inst->instance_of.empty()) return;
    const ModuleInfo* callee = d_.find_module(inst->instance_of);
    if (!callee) return;
    int callee_idx = d_.module_by_name.at(inst->instance_of);
    int tail = kid(node, 2);
    if (alt(tail) != 0) return;  // no connection list
    int clo = kid(tail, 1);
    if (alt(clo) != 0) return;
    int conn_list = kid(clo, 0);

    auto port_tvar = [&](const std::string& pname) -> std::optional<int> {
      auto it = set_.symbol_tvars.find({callee_idx, pname});
      if (it == set_.symbol_tvars.end()) return std::nullopt;
      return it->second;
    };
    auto handle = [&](int expr, const Symbol& port) {
      int ch = set_.fresh();
      auto ptv = port_tvar(port.name);
      if (ptv) eq_vv(ch, *ptv, expr);
      if (port.dir == Direction::In) {
        walk_expr(expr, ch);
        return;
      }
      // Output or inout: the bare host identifier is driven by the callee.
      int leaf = wbare_id_leaf(t(), expr);
      if (leaf < 0) return;  // scope rejected this shape already
      auto htv = tvar_of_name(lex(leaf));
      if (htv) {
        eq_vv(ch, *htv, expr);
        famreq(*htv, Family::Net, "output connection", expr);
      }
    };

    if (alt(conn_list) == 0) {  // named
      int list = kid(conn_list, 0);
      int conn = kid(list, 0);
      int ctail = kid(list, 1);
      for (;;) {
        const Symbol* port = callee->find(lex(kid(conn, 1)));
        if (port) handle(kid(conn, 3), *port);
        if (alt(ctail) != 0) break;
        conn = kid(ctail, 1);
        ctail = kid(ctail, 2);
      }
    } else {  // positional
      int list = kid(conn_list, 0);
      int expr = kid(list, 0);
      int ctail = kid(list, 1);
      size_t i = 0;
      for (;;) {
        if (i < callee->ports.size()) {
          handle(expr, callee->symbols[callee->ports[i]]);
        }
        ++i;
        if (alt(ctail) != 0) break;
        expr = kid(ctail, 1);
        ctail = kid(ctail, 2);
      }
    }
  }

  // --- statements -----------------------------------------------------------

  void walk_statement(int node) {
    int inner = kid(node, 0);
    switch (alt(node)) {
      case 0: {  // ProcAssign
        int ch = set_.fresh();
        walk_lvalue(kid(inner, 0), ch, Family::Var, "procedural assignment");
        walk_expr(kid(kid(inner, 1), 1), ch);
        break;
      }
      case 1: {  // IfStmt
        walk_expr(kid(inner, 2), set_.fresh());
        walk_statement(kid(inner, 4));
        int else_opt = kid(inner, 5);
        if (alt(else_opt) == 0) walk_statement(kid(else_opt, 1));
        break;
      }
      case 2: {  // CaseStmt: items unify with the subject
        int subj = set_.fresh();
        walk_expr(kid(inner, 2), subj);
        int items = kid(inner, 4);
        int item = kid(items, 0);
        int tail = kid(items, 1);
        for (;;) {
          if (alt(item) == 0) walk_expr(kid(item, 0), subj);
          walk_statement(kid(item, 2));
          if (alt(tail) != 0) break;
          item = kid(tail, 0);
          tail = kid(tail, 1);
        }
        break;
      }
      default: {  // SeqBlock
        int list = kid(inner, 1);
        while (alt(list) == 0) {
          walk_statement(kid(list, 0));
          list = kid(list, 1);
        }
        break;
      }
    }
  }

  // --- lvalues --------------------------------------------------------------

  void walk_lvalue(int node, int dest, Family req, const char* origin) {
    int id_leaf = kid(node, 0);
    int tail = kid(node, 1);
    switch (alt(tail)) {
      case 0: {  // instance.member
        const Symbol* base = mod().find(lex(id_leaf));
        if (!base) return;
        const std::string& member = lex(kid(tail, 1));
        if (base->struct_instance) {
          const StructInfo* st = d_.find_struct(base->instance_of);
          int tm = set_.fresh();
          if (st) {
            for (const auto& sm : st->members) {
              if (sm.name == member) {
                eq_vp(tm, TypePattern{Family::Var, sm.width, sm.is_signed}, tail);
              }
            }
          }
          eq_vv(dest, tm, node);
          famreq(tm, req, origin, node);
        } else if (!base->instance_of.empty()) {
          auto it = d_.module_by_name.find(base->instance_of);
          if (it == d_.module_by_name.end()) return;
          auto mt = set_.symbol_tvars.find({it->second, member});
          if (mt == set_.symbol_tvars.end()) return;
          eq_vv(dest, mt->second, node);
          famreq(mt->second, req, origin, node);
        }
        break;
      }
      case 1: {  // id [ expr SelTail ]
        auto tv = tvar_of_name(lex(id_leaf));
        if (tv) famreq(*tv, req, origin, node);
        walk_select_result(kid(tail, 1), kid(tail, 2), dest, node);
        break;
      }
      default: {
        auto tv = tvar_of_name(lex(id_leaf));
        if (tv) {
          eq_vv(dest, *tv, node);
          famreq(*tv, req, origin, node);
        }
        break;
      }
    }
  }

  // Select applied at `node`: bit select is one unsigned bit; part select
  // has the folded constant width.
  void walk_select_result(int index_expr, int sel_tail, int dest, int node) {
    if (alt(sel_tail) == 0) {
      auto a = fold(index_expr);
      auto b = fold(kid(sel_tail, 1));
      if (!a || !b) {
        error_at(node, "part-select bounds are not constant");
        return;
      }
      if (*a < *b) {
        error_at(node, "part-select is reversed");
        return;
      }
      eq_vp(dest, TypePattern{std::nullopt, static_cast<int>(*a - *b + 1), false}, node);
    } else {
      walk_expr(index_expr, set_.fresh());
      eq_vp(dest, TypePattern{std::nullopt, 1, false}, node);
    }
  }

  // --- expressions (destination passing) ------------------------------------

  void walk_expr(int node, int dest) {
    // Expression -> Ternary
    walk_ternary(kid(node, 0), dest);
  }

  void walk_ternary(int node, int dest) {
    int tail = kid(node, 1);
    if (alt(tail) == 0) {
      // cond ? a : b -- the condition's type is free; both arms share dest.
      walk_binary(kid(node, 0), set_.fresh());
      walk_expr(kid(tail, 1), dest);
      walk_ternary(kid(tail, 3), dest);
    } else {
      walk_binary(kid(node, 0), dest);
    }
  }

  struct ChainLink {
    Tok op;
    int operand;  // node of the right operand
  };

  void walk_binary(int node, int dest) {
    NT nt = lhs(node);
    if (nt == NT::UnaryExpr) {
      walk_unary(node, dest);
      return;
    }
    // Collect the operator chain at this precedence level.
    int first = kid(node, 0);
    std::vector<ChainLink> links;
    int tail = kid(node, 1);
    const auto& alts = Grammar::get().rules_for(lhs(tail));
    int empty_alt = static_cast<int>(alts.size()) - 1;
    while (alt(tail) != empty_alt) {
      Tok op = t().at(kid(tail, 0)).tok.kind;
      links.push_back({op, kid(tail, 1)});
      tail = kid(tail, 2);
    }
    if (links.empty()) {
      walk_binary(first, dest);
      return;
    }
    walk_chain(first, links, links.size(), dest, node);
  }

  // Left-associative: operands[0] op1 ... op_n operands[n].  The prefix up
  // to n-1 feeds the left side of op_n.
  void walk_chain(int first, const std::vector<ChainLink>& links, size_t n, int dest,
                  int node) {
    if (n == 0) {
      walk_binary(first, dest);
      return;
    }
    int tl = set_.fresh();
    int tr = set_.fresh();
    apply_binop(links[n - 1].op, tl, tr, dest, node);
    walk_chain(first, links, n - 1, tl, node);
    walk_binary(links[n - 1].operand, tr);
  }

  void apply_binop(Tok op, int tl, int tr, int dest, int node) {
    switch (op) {
      case Tok::plus:
      case Tok::minus:
        eq_vv(tl, tr, node);
        cond(tl, dest, CondForm::NPlus1, node);
        cond(tr, dest, CondForm::NPlus1, node);
        break;
      case Tok::star:
      case Tok::slash:
      case Tok::percent:
      case Tok::amp:
      case Tok::pipe:
      case Tok::caret:
        eq_vv(tl, tr, node);
        eq_vv(dest, tl, node);
        break;
      case Tok::shl:
      case Tok::shr:
        eq_vv(dest, tl, node);
        break;  // shift amount is free
      case Tok::eq_eq:
      case Tok::bang_eq:
      case Tok::lt:
      case Tok::gt:
      case Tok::le:
      case Tok::ge:
        eq_vv(tl, tr, node);
        eq_vp(dest, kWidth1, node);
        break;
      case Tok::amp_amp:
      case Tok::pipe_pipe:
        eq_vp(dest, kWidth1, node);
        break;  // operands free
      default:
        grammar_bug("unknown binary operator");
    }
  }

  void walk_unary(int node, int dest) {
    if (alt(node) == 6) {
      walk_primary(kid(node, 0), dest);
      return;
    }
    Tok op = t().at(kid(node, 0)).tok.kind;
    switch (op) {
      case Tok::tilde:
      case Tok::minus:
        walk_unary(kid(node, 1), dest);  // width-preserving
        break;
      case Tok::bang:
      case Tok::amp:
      case Tok::pipe:
      case Tok::caret:
        walk_unary(kid(node, 1), set_.fresh());
        eq_vp(dest, kWidth1, node);
        break;
      default:
        grammar_bug("unknown unary operator");
    }
  }

  void walk_primary(int node, int dest) {
    switch (alt(node)) {
      case 0: walk_primary_ident(node, dest); break;
      case 1: break;  // unsized literal: adapts to any width
      case 2: {       // sized literal pins the width
        auto v = sized_width(lex(kid(node, 0)));
        if (v) eq_vp(dest, TypePattern{std::nullopt, *v, std::nullopt}, node);
        break;
      }
      case 3: walk_expr(kid(node, 1), dest); break;
      default: {  // Concat: element widths are independent; dest is free
        int concat = kid(node, 0);
        walk_expr(kid(concat, 1), set_.fresh());
        int tail = kid(concat, 2);
        while (alt(tail) == 0) {
          walk_expr(kid(tail, 1), set_.fresh());
          tail = kid(tail, 2);
        }
        break;
      }
    }
  }

  static std::optional<int> sized_width(const std::string& lx) {
    size_t tick = lx.find('\'');
    if (tick == std::string::npos || tick == 0) return std::nullopt;
    try {
      return std::stoi(lx.substr(0, tick));
    } catch (...) {
      return std::nullopt;
    }
  }

  void walk_primary_ident(int node, int dest) {
    int id_leaf = kid(node, 0);
    int tail = kid(node, 1);
    switch (alt(tail)) {
      case 0: {  // instance.member read
        const Symbol* base = in_fn_ ? nullptr : mod().find(lex(id_leaf));
        if (!base) return;
        const std::string& member = lex(kid(tail, 1));
        if (base->struct_instance) {
          const StructInfo* st = d_.find_struct(base->instance_of);
          if (st) {
            for (const auto& sm : st->members) {
              if (sm.name == member) {
                eq_vp(dest, TypePattern{Family::Var, sm.width, sm.is_signed}, node);
              }
            }
          }
        } else if (!base->instance_of.empty()) {
          auto it = d_.module_by_name.find(base->instance_of);
          if (it == d_.module_by_name.end()) return;
          auto mt = set_.symbol_tvars.find({it->second, member});
          if (mt != set_.symbol_tvars.end()) eq_vv(dest, mt->second, node);
        }
        break;
      }
      case 1: {  // select read
        walk_select_result(kid(tail, 1), kid(tail, 2), dest, node);
        break;
      }
      case 2: {  // call
        walk_call(id_leaf, kid(tail, 1), dest, node);
        break;
      }
      default: {
        auto tv = tvar_of_name(lex(id_leaf));
        if (tv) eq_vv(dest, *tv, node);
        break;
      }
    }
  }

  void walk_call(int fn_leaf, int call_args_opt, int dest, int node) {
    const std::string& fname = lex(fn_leaf);
    auto rit = set_.return_tvars.find({cur_, fname});
    if (rit != set_.return_tvars.end()) eq_vv(dest, rit->second, node);

    // Pair arguments with the callee's ports in order.
    std::vector<std::string> port_names;
    const Symbol* fn = mod().find(fname);
    if (fn && fn->kind == SymKind::Function) {
      int fpo = kid(fn->decl_node, 5);
      if (alt(fpo) == 0) {
        int list = kid(fpo, 0);
        int fp = kid(list, 0);
        int tail = kid(list, 1);
        for (;;) {
          port_names.push_back(lex(kid(fp, 2)));
          if (alt(tail) != 0) break;
          fp = kid(tail, 1);
          tail = kid(tail, 2);
        }
      }
    }

    size_t i = 0;
    if (alt(call_args_opt) == 0) {
      int list = kid(call_args_opt, 0);
      int expr = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        int ta = set_.fresh();
        walk_expr(expr, ta);
        if (i < port_names.size()) {
          auto pt = set_.symbol_tvars.find({cur_, fname + "." + port_names[i]});
          if (pt != set_.symbol_tvars.end()) eq_vv(ta, pt->second, expr);
        }
        ++i;
        if (alt(tail) != 0) break;
        expr = kid(tail, 1);
        tail = kid(tail, 2);
      }
    }
  }
};

}  // namespace

ConstraintSet generate_constraints(const NamedDesign& design, TypeFactMode mode) {
  ConstraintWalker w(design, mode);
  w.run();
  return std::move(w).take();
}

// --- unification ------------------------------------------------------------

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), pat_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  TypePattern& pattern(int x) { return pat_[find(x)]; }

  // Merges `p` into x's pattern.  Width and family disagreements error;
  // signedness resolves mixed pairs to unsigned.
  std::optional<TypeError> merge_pattern(int x, const TypePattern& p, int line, int col) {
    TypePattern& r = pattern(x);
    if (p.family) {
      if (r.family && *r.family != *p.family) {
        return TypeError{"conflicting net/variable use", line, col};
      }
      r.family = p.family;
    }
    if (p.width) {
      if (r.width && *r.width != *p.width) {
        return TypeError{"conflicting widths (" + std::to_string(*r.width) + " vs " +
                             std::to_string(*p.width) + ")",
                         line, col};
      }
      r.width = p.width;
    }
    if (p.is_signed) {
      if (r.is_signed && *r.is_signed != *p.is_signed) {
        r.is_signed = false;  // mixed signedness falls back to unsigned
      } else {
        r.is_signed = p.is_signed;
      }
    }
    return std::nullopt;
  }

  std::optional<TypeError> unite(int a, int b, int line, int col) {
    int ra = find(a);
    int rb = find(b);
    if (ra == rb) return std::nullopt;
    TypePattern pb = pat_[rb];
    parent_[rb] = ra;
    return merge_pattern(ra, pb, line, col);
  }

 private:
  std::vector<int> parent_;
  std::vector<TypePattern> pat_;
};

std::string famreq_message(const FamilyRequirement& r, Family found) {
  if (r.required == Family::Var && found == Family::Net) {
    if (r.origin == "procedural assignment") {
      return "wires cannot be assigned inside an always block";
    }
    return r.origin + " requires a variable target";
  }
  if (r.origin == "continuous assignment") {
    return "variables cannot be driven by a continuous assignment";
  }
  if (r.origin == "gate output") return "gate outputs must drive nets";
  if (r.origin == "output connection") return "output port connections must drive nets";
  return "conflicting net/variable use";
}

}  // namespace

Result<TypeEnvironment, TypeError> unify(const ConstraintSet& set,
                                         const NamedDesign& design) {
  (void)design;
  if (!set.errors.empty()) return set.errors.front();

  UnionFind uf(set.num_tvars);

  for (const Constraint& c : set.constraints) {
    switch (c.kind) {
      case Constraint::Kind::EqVarVar: {
        auto err = uf.unite(c.a, c.b, c.line, c.col);
        if (err) return *err;
        break;
      }
      case Constraint::Kind::EqVarPat: {
        auto err = uf.merge_pattern(c.a, c.pat, c.line, c.col);
        if (err) return *err;
        break;
      }
      case Constraint::Kind::Cond:
        break;  // handled at the fixpoint below
    }
  }

  for (const FamilyRequirement& r : set.family_reqs) {
    TypePattern& p = uf.pattern(r.tvar);
    if (p.family && *p.family != r.required) {
      return TypeError{famreq_message(r, *p.family), r.line, r.col};
    }
    p.family = r.required;
  }

  // Conditional width rules fire once each, whenever their antecedent
  // widths become known; whatever never fires is dropped.
  std::vector<bool> fired(set.constraints.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < set.constraints.size(); ++i) {
      const Constraint& c = set.constraints[i];
      if (c.kind != Constraint::Kind::Cond || fired[i]) continue;
      const TypePattern& pa = uf.pattern(c.a);
      std::optional<int> w;
      switch (c.form) {
        case CondForm::SameN:
          if (pa.width) w = *pa.width;
          break;
        case CondForm::NPlus1:
          if (pa.width) w = *pa.width + 1;
          break;
        case CondForm::MaxOfTwo: {
          const TypePattern& pb = uf.pattern(c.b);
          if (pa.width && pb.width) w = std::max(*pa.width, *pb.width);
          break;
        }
      }
      if (!w) continue;
      auto err = uf.merge_pattern(c.dest, TypePattern{std::nullopt, *w, std::nullopt},
                                  c.line, c.col);
      if (err) return *err;
      fired[i] = true;
      changed = true;
    }
  }

  TypeEnvironment env;
  env.resolved.resize(set.num_tvars);
  for (int i = 0; i < set.num_tvars; ++i) env.resolved[i] = uf.pattern(i);
  env.symbol_tvars = set.symbol_tvars;
  return env;
}

// --- defaulting and materialization -----------------------------------------

namespace {

// Rewrites an empty SignedOpt to carry `signed`.
void materialize_signed(Tree& t, int signed_opt) {
  if (walt(t, signed_opt) == 0) return;
  static const int rule = find_rule(NT::SignedOpt, {T(Tok::kw_signed)});
  TreeBuilder b(t);
  int leaf = b.leaf(Tok::kw_signed);
  t.at(signed_opt).rule = rule;
  t.at(signed_opt).kids = {leaf};
}

// Rewrites an empty RangeOpt to [w-1:0].
void materialize_range(Tree& t, int range_opt, int width) {
  if (walt(t, range_opt) == 0) return;
  TreeBuilder b(t);
  static const int const_term_num = find_rule(NT::ConstTerm, {T(Tok::number)});
  static const int tail_empty = find_rule(NT::ConstExprTail, {});
  static const int const_expr =
      find_rule(NT::ConstExpr, {N(NT::ConstTerm), N(NT::ConstExprTail)});
  static const int range_rule =
      find_rule(NT::Range, {T(Tok::lbracket), N(NT::ConstExpr), T(Tok::colon),
                            N(NT::ConstExpr), T(Tok::rbracket)});
  static const int range_opt_rule = find_rule(NT::RangeOpt, {N(NT::Range)});
  auto const_num = [&](int64_t v) {
    int leaf = b.leaf(Tok::number, std::to_string(v));
    int term = b.node(const_term_num, {leaf});
    int tail = b.node(tail_empty, {});
    return b.node(const_expr, {term, tail});
  };
  int range = b.node(range_rule, {b.leaf(Tok::lbracket), const_num(width - 1),
                                  b.leaf(Tok::colon), const_num(0), b.leaf(Tok::rbracket)});
  t.at(range_opt).rule = range_opt_rule;
  t.at(range_opt).kids = {range};
}

// Turns a keyword-less PortType into `reg SignedOpt RangeOpt`.
void materialize_var_family(Tree& t, int port_type) {
  if (walt(t, port_type) != 1) return;
  TreeBuilder b(t);
  static const int reg_rule = find_rule(NT::NetOrVar, {T(Tok::kw_reg)});
  static const int full_rule =
      find_rule(NT::PortType, {N(NT::NetOrVar), N(NT::SignedOpt), N(NT::RangeOpt)});
  int kw = b.node(reg_rule, {b.leaf(Tok::kw_reg)});
  int signed_opt = wkid(t, port_type, 0);
  int range_opt = wkid(t, port_type, 1);
  t.at(port_type).rule = full_rule;
  t.at(port_type).kids = {kw, signed_opt, range_opt};
}

void surgery_port_type(Tree& t, int port_type, const ConcreteType& c) {
  if (c.family == Family::Var) materialize_var_family(t, port_type);
  int base = walt(t, port_type) == 0 ? 1 : 0;
  if (c.is_signed) materialize_signed(t, wkid(t, port_type, base));
  if (c.width > 1) materialize_range(t, wkid(t, port_type, base + 1), c.width);
}

ConcreteType concrete_from(const TypePattern& p) {
  ConcreteType c;
  c.family = p.family.value_or(Family::Net);
  c.width = p.width.value_or(1);
  c.is_signed = p.is_signed.value_or(false);
  return c;
}

}  // namespace

TypedDesign apply_defaults(TypeEnvironment env, NamedDesign design) {
  TypedDesign out;
  out.symbol_types.resize(design.modules.size());

  for (int m = 0; m < static_cast<int>(design.modules.size()); ++m) {
    for (const Symbol& s : design.modules[m].symbols) {
      auto it = env.symbol_tvars.find({m, s.name});
      if (it == env.symbol_tvars.end()) continue;
      ConcreteType c = concrete_from(env.resolved[it->second]);
      env.resolved[it->second] = TypePattern{c.family, c.width, c.is_signed};
      out.symbol_types[m][s.name] = c;
      if (s.kind == SymKind::Port) {
        surgery_port_type(design.tree, wkid(design.tree, s.decl_node, 1), c);
      }
    }
    // Function ports: materialize open slots the same way.  (Return slots
    // are grounded by the caller, which still holds their tvars.)
    for (const Symbol& s : design.modules[m].symbols) {
      if (s.kind != SymKind::Function) continue;
      int fpo = wkid(design.tree, s.decl_node, 5);
      if (walt(design.tree, fpo) == 0) {
        int list = wkid(design.tree, fpo, 0);
        int fp = wkid(design.tree, list, 0);
        int tail = wkid(design.tree, list, 1);
        for (;;) {
          auto pit = env.symbol_tvars.find(
              {m, s.name + "." + wlex(design.tree, wkid(design.tree, fp, 2))});
          if (pit != env.symbol_tvars.end()) {
            ConcreteType c = concrete_from(env.resolved[pit->second]);
            env.resolved[pit->second] = TypePattern{c.family, c.width, c.is_signed};
            surgery_port_type(design.tree, wkid(design.tree, fp, 1), c);
          }
          if (walt(design.tree, tail) != 0) break;
          fp = wkid(design.tree, tail, 1);
          tail = wkid(design.tree, tail, 2);
        }
      }
    }
  }

  out.design = std::move(design);
  out.env = std::move(env);
  return out;
}

Result<TypedDesign, TypeError> infer(NamedDesign design, TypeFactMode mode) {
  ConstraintSet set = generate_constraints(design, mode);
  auto env = unify(set, design);
  if (!env.ok()) return env.error();

  // Ground the function-return slots too: they are keyed separately.
  TypeEnvironment e = std::move(env.value());
  for (int m = 0; m < static_cast<int>(design.modules.size()); ++m) {
    for (const Symbol& s : design.modules[m].symbols) {
      if (s.kind != SymKind::Function) continue;
      auto it = set.return_tvars.find({m, s.name});
      if (it == set.return_tvars.end()) continue;
      ConcreteType c = concrete_from(e.resolved[it->second]);
      e.resolved[it->second] = TypePattern{c.family, c.width, c.is_signed};
      if (c.is_signed) materialize_signed(design.tree, wkid(design.tree, s.decl_node, 1));
      if (c.width > 1) {
        materialize_range(design.tree, wkid(design.tree, s.decl_node, 2), c.width);
      }
    }
  }

  return apply_defaults(std::move(e), std::move(design));
}

}  // namespace vgen
