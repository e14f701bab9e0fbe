#include "vgen/scope.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

#include "vgen/types.hpp"

namespace vgen {

const char* sym_kind_name(SymKind k) {
  switch (k) {
    case SymKind::Net: return "net";
    case SymKind::Var: return "variable";
    case SymKind::Port: return "port";
    case SymKind::Param: return "parameter";
    case SymKind::Function: return "function";
    case SymKind::Module: return "module";
    case SymKind::StructType: return "struct type";
    case SymKind::Instance: return "instance";
  }
  return "?";
}

namespace {

// Internal control flow for generation-mode dead ends; converted to a
// ResolveFailure value at the API boundary.
struct Bail {
  std::string reason;
};

enum class Mode { Generate, Check };
enum class WriteKind { Continuous, Procedural };

struct PendingMemberCheck {
  std::string callee;  // module name
  std::string member;
  MemberNeed need;
  int line = 0;
  int col = 0;
};

class Walker {
 public:
  Walker(Mode mode, Tree tree, Rng* rng, ResolveOptions opts)
      : mode_(mode), rng_(rng), opts_(opts) {
    d_.tree = std::move(tree);
  }

  NamedDesign take_design() { return std::move(d_); }
  std::vector<ScopeViolation>& violations() { return viol_; }

  void run() {
    if (mode_ == Mode::Check) pre_pass();
    walk_description_list(kid(t().root, 0));
    if (mode_ == Mode::Check) finish_deferred();
  }

 private:
  Mode mode_;
  Rng* rng_;
  ResolveOptions opts_;
  NamedDesign d_;
  std::vector<ScopeViolation> viol_;

  // File-level parameters as pickable symbols.
  std::vector<Symbol> file_param_syms_;

  // Check-mode pre-pass tables (module and struct names resolve file-wide).
  std::set<std::string> pre_modules_;
  std::set<std::string> pre_structs_;
  std::map<std::string, std::vector<Symbol>> pre_module_ports_;
  std::map<std::string, std::set<std::string>> pre_struct_members_;
  std::vector<PendingMemberCheck> deferred_;

  // Current-module / current-function state.
  int cur_mod_ = -1;
  int item_idx_ = -1;
  bool in_fn_ = false;
  std::vector<Symbol> fn_syms_;
  std::map<std::string, int> fn_by_name_;
  std::string declaring_;  // name whose initializer is being walked (check)

  // --- tree shorthands ------------------------------------------------------

  Tree& t() { return d_.tree; }
  int kid(int node, int i) const { return d_.tree.at(node).kids[i]; }
  const std::string& lex(int leaf) const { return d_.tree.at(leaf).tok.lexeme; }

  // Index of a node's rule among its nonterminal's alternatives.
  int alt(int node) const {
    const Node& n = d_.tree.at(node);
    const auto& ids = Grammar::get().rules_for(Grammar::get().rule(n.rule).lhs);
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == n.rule) return static_cast<int>(i);
    }
    grammar_bug("rule not among its lhs alternatives");
    return -1;
  }
  NT lhs(int node) const { return d_.tree.lhs_of(node); }

  int first_leaf(int node) const {
    int cur = node;
    while (!d_.tree.is_leaf(cur)) {
      if (d_.tree.at(cur).kids.empty()) return -1;
      cur = d_.tree.at(cur).kids[0];
    }
    return cur;
  }
  void pos_of(int node, int* line, int* col) const {
    int leaf = first_leaf(node);
    *line = leaf < 0 ? 0 : d_.tree.at(leaf).tok.line;
    *col = leaf < 0 ? 0 : d_.tree.at(leaf).tok.col;
  }

  // --- diagnostics ----------------------------------------------------------

  void violation(int node, std::string msg) {
    ScopeViolation v;
    v.message = std::move(msg);
    pos_of(node, &v.line, &v.col);
    viol_.push_back(std::move(v));
  }

  [[noreturn]] void bail(std::string reason) { throw Bail{std::move(reason)}; }

  // Position failed per mode: generation reseeds, checking records.
  void reject(int node, std::string msg) {
    if (mode_ == Mode::Generate) bail(std::move(msg));
    violation(node, std::move(msg));
  }

  // --- naming ---------------------------------------------------------------

  std::string mint() { return "id_" + std::to_string(d_.next_id++); }

  void set_name(int leaf, const std::string& name) {
    Node& n = t().at(leaf);
    assert(n.tok.kind == Tok::identifier);
    n.tok.lexeme = name;
    n.placeholder = false;
    n.ph_ord = -1;
  }

  // Fills or reads the identifier at a declaration site.
  std::string decl_name(int leaf) {
    if (mode_ == Mode::Generate) {
      std::string name = mint();
      set_name(leaf, name);
      return name;
    }
    return lex(leaf);
  }

  // --- symbol tables --------------------------------------------------------

  ModuleInfo& mod() { return d_.modules[cur_mod_]; }

  void declare_in_module(Symbol sym, int at_node) {
    ModuleInfo& m = mod();
    if (m.by_name.count(sym.name)) {
      violation(at_node, "duplicate declaration of '" + sym.name + "'");
      return;
    }
    m.by_name[sym.name] = static_cast<int>(m.symbols.size());
    m.symbols.push_back(std::move(sym));
  }

  void declare_in_fn(Symbol sym, int at_node) {
    if (fn_by_name_.count(sym.name)) {
      violation(at_node, "duplicate declaration of '" + sym.name + "'");
      return;
    }
    fn_by_name_[sym.name] = static_cast<int>(fn_syms_.size());
    fn_syms_.push_back(std::move(sym));
  }

  int64_t param_value(const std::string& name, bool* found) const {
    if (cur_mod_ >= 0) {
      auto it = d_.modules[cur_mod_].params.find(name);
      if (it != d_.modules[cur_mod_].params.end()) {
        *found = true;
        return it->second;
      }
    }
    auto it = d_.file_params.find(name);
    if (it != d_.file_params.end()) {
      *found = true;
      return it->second;
    }
    *found = false;
    return 0;
  }

  std::map<std::string, int64_t> visible_params() const {
    std::map<std::string, int64_t> out = d_.file_params;
    if (cur_mod_ >= 0) {
      for (const auto& [k, v] : d_.modules[cur_mod_].params) out[k] = v;
    }
    return out;
  }

  // --- lookup / candidate enumeration --------------------------------------

  enum class Miss { Undeclared, SelfRef, NotVisibleInFn, TypeNameAsValue };

  const Symbol* lookup(const std::string& name, Miss* miss) const {
    *miss = Miss::Undeclared;
    if (in_fn_) {
      auto it = fn_by_name_.find(name);
      if (it != fn_by_name_.end()) return &fn_syms_[it->second];
      if (cur_mod_ >= 0) {
        const ModuleInfo& m = d_.modules[cur_mod_];
        auto mit = m.by_name.find(name);
        if (mit != m.by_name.end()) {
          if (m.symbols[mit->second].kind == SymKind::Param) return &m.symbols[mit->second];
          *miss = Miss::NotVisibleInFn;
          return nullptr;
        }
      }
      for (const auto& s : file_param_syms_) {
        if (s.name == name) return &s;
      }
    } else {
      if (cur_mod_ >= 0) {
        const ModuleInfo& m = d_.modules[cur_mod_];
        auto mit = m.by_name.find(name);
        if (mit != m.by_name.end()) return &m.symbols[mit->second];
      }
      for (const auto& s : file_param_syms_) {
        if (s.name == name) return &s;
      }
    }
    if (name == declaring_ && !name.empty()) {
      *miss = Miss::SelfRef;
    } else if (pre_modules_.count(name) || pre_structs_.count(name)) {
      *miss = Miss::TypeNameAsValue;
    }
    return nullptr;
  }

  using Pred = std::function<bool(const Symbol&)>;

  std::vector<const Symbol*> collect(const Pred& pred) const {
    std::vector<const Symbol*> out;
    if (in_fn_) {
      for (const auto& s : fn_syms_) {
        if (pred(s)) out.push_back(&s);
      }
      if (cur_mod_ >= 0) {
        for (const auto& s : d_.modules[cur_mod_].symbols) {
          if (s.kind == SymKind::Param && pred(s)) out.push_back(&s);
        }
      }
    } else if (cur_mod_ >= 0) {
      for (const auto& s : d_.modules[cur_mod_].symbols) {
        if (pred(s)) out.push_back(&s);
      }
    }
    for (const auto& s : file_param_syms_) {
      if (pred(s)) out.push_back(&s);
    }
    return out;
  }

  // Resolves (or verifies) one identifier leaf against a kind filter.
  // Returns the symbol when available; check mode may return null after
  // recording a violation.
  const Symbol* resolve_use(int leaf, const Pred& pred, const std::string& desc) {
    if (mode_ == Mode::Generate) {
      auto cands = collect(pred);
      if (cands.empty()) bail("no candidate for " + desc);
      const Symbol* pick = cands[rng_->below(cands.size())];
      set_name(leaf, pick->name);
      return pick;
    }
    Miss miss;
    const Symbol* sym = lookup(lex(leaf), &miss);
    if (!sym) {
      switch (miss) {
        case Miss::SelfRef:
          violation(leaf, "'" + lex(leaf) + "' is read in its own initializer");
          break;
        case Miss::NotVisibleInFn:
          violation(leaf, "'" + lex(leaf) + "' is not visible inside a function");
          break;
        case Miss::TypeNameAsValue:
          violation(leaf, "module or type name '" + lex(leaf) + "' used as a value");
          break;
        default:
          violation(leaf, "'" + lex(leaf) + "' is undeclared");
      }
      return nullptr;
    }
    if (!pred(*sym)) {
      violation(leaf, "'" + sym->name + "' (" + sym_kind_name(sym->kind) +
                          ") cannot be used as " + desc);
      return nullptr;
    }
    return sym;
  }

  // --- kind filters ---------------------------------------------------------

  static bool readable(const Symbol& s) {
    switch (s.kind) {
      case SymKind::Net:
      case SymKind::Var:
      case SymKind::Port:
      case SymKind::Param:
        return true;
      case SymKind::Instance:
        return s.struct_instance;
      default:
        return false;
    }
  }
  static bool edge_signal(const Symbol& s) {
    return s.kind == SymKind::Net || s.kind == SymKind::Var || s.kind == SymKind::Port;
  }
  static bool cont_target(const Symbol& s) {
    if (s.kind == SymKind::Net) return true;
    return s.kind == SymKind::Port && s.dir != Direction::In && s.fam != FamilyHint::VarH;
  }
  static bool proc_target(const Symbol& s) {
    if (s.kind == SymKind::Var) return true;
    if (s.kind == SymKind::Instance && s.struct_instance) return true;
    return s.kind == SymKind::Port && s.dir == Direction::Out && s.fam != FamilyHint::NetH;
  }
  static bool const_readable(const Symbol& s) { return s.kind == SymKind::Param; }
  static bool module_instance(const Symbol& s) {
    return s.kind == SymKind::Instance && !s.struct_instance && !s.instance_of.empty();
  }
  static bool hier_base_read(const Symbol& s) {
    return module_instance(s) || (s.kind == SymKind::Instance && s.struct_instance);
  }

  // --- check-mode pre-pass --------------------------------------------------

  FamilyHint port_family_hint(int port_type_node) const {
    if (alt(port_type_node) != 0) return FamilyHint::Open;
    int kw = kid(port_type_node, 0);  // NetOrVar
    return alt(kw) == 0 ? FamilyHint::NetH : FamilyHint::VarH;
  }

  Direction direction_of(int dir_node) const {
    switch (alt(dir_node)) {
      case 0: return Direction::In;
      case 1: return Direction::Out;
      default: return Direction::Inout;
    }
  }

  std::vector<Symbol> scan_ports(int module_node) const {
    std::vector<Symbol> out;
    int plo = kid(module_node, 2);  // PortListOpt
    if (alt(plo) != 0) return out;
    int po = kid(plo, 1);  // PortsOpt
    if (alt(po) != 0) return out;
    int pl = kid(po, 0);  // PortList
    int port = kid(pl, 0);
    int tail = kid(pl, 1);
    for (;;) {
      Symbol s;
      s.name = lex(kid(port, 2));
      s.kind = SymKind::Port;
      s.dir = direction_of(kid(port, 0));
      s.fam = port_family_hint(kid(port, 1));
      s.decl_node = port;
      s.decl_order = -1;
      out.push_back(std::move(s));
      if (alt(tail) != 0) break;
      port = kid(tail, 1);
      tail = kid(tail, 2);
    }
    return out;
  }

  void pre_pass() {
    int list = kid(t().root, 0);
    while (alt(list) == 0) {
      int desc = kid(list, 0);
      int inner = kid(desc, 0);
      if (alt(desc) == 0) {  // ModuleDecl
        const std::string& name = lex(kid(inner, 1));
        if (!pre_modules_.insert(name).second) {
          violation(kid(inner, 1), "duplicate module name '" + name + "'");
        } else {
          pre_module_ports_[name] = scan_ports(inner);
        }
      } else if (alt(desc) == 1) {  // TypedefDecl
        const std::string& name = lex(kid(inner, 6));
        if (!pre_structs_.insert(name).second) {
          violation(kid(inner, 6), "duplicate type name '" + name + "'");
        } else {
          auto& members = pre_struct_members_[name];
          int ml = kid(inner, 4);
          int member = kid(ml, 0);
          int tail = kid(ml, 1);
          for (;;) {
            members.insert(lex(kid(member, 3)));
            if (alt(tail) != 0) break;
            member = kid(tail, 0);
            tail = kid(tail, 1);
          }
        }
      }
      list = kid(list, 1);
    }
  }

  void finish_deferred() {
    for (const auto& p : deferred_) {
      const ModuleInfo* callee = d_.find_module(p.callee);
      if (!callee) continue;  // unknown-module violation already recorded
      const Symbol* m = callee->find(p.member);
      bool ok = false;
      if (m) {
        switch (p.need) {
          case MemberNeed::Read:
            ok = m->kind == SymKind::Net || m->kind == SymKind::Var ||
                 m->kind == SymKind::Port;
            break;
          case MemberNeed::WriteNet:
            ok = m->kind == SymKind::Net;
            break;
          case MemberNeed::WriteVar:
            ok = m->kind == SymKind::Var;
            break;
        }
      }
      if (!m) {
        viol_.push_back({"'" + p.callee + "' has no member '" + p.member + "'", p.line, p.col});
      } else if (!ok) {
        viol_.push_back({"member '" + p.member + "' of '" + p.callee +
                             "' cannot be driven that way",
                         p.line, p.col});
      }
    }
  }

  // --- constant folding over ConstExpr shapes -------------------------------

  std::optional<int64_t> fold_const(int node) const {
    return fold_const_subtree(d_.tree, node, visible_params());
  }

  // --- walks ----------------------------------------------------------------

  void walk_description_list(int list) {
    while (alt(list) == 0) {
      int desc = kid(list, 0);
      int inner = kid(desc, 0);
      switch (alt(desc)) {
        case 0: walk_module(inner); break;
        case 1: walk_typedef(inner); break;
        default: walk_localparam(inner, /*file_level=*/true); break;
      }
      list = kid(list, 1);
    }
  }

  void walk_module(int node) {
    ModuleInfo m;
    m.node = node;
    m.name = decl_name(kid(node, 1));
    if (mode_ == Mode::Generate) {
      if (d_.module_by_name.count(m.name)) bail("duplicate module name");
    }
    cur_mod_ = static_cast<int>(d_.modules.size());
    d_.modules.push_back(std::move(m));
    if (!d_.module_by_name.count(mod().name)) {
      d_.module_by_name[mod().name] = cur_mod_;
    }
    item_idx_ = -1;

    walk_port_list(kid(node, 2));

    int items = kid(node, 4);
    while (alt(items) == 0) {
      ++item_idx_;
      walk_item(kid(items, 0));
      items = kid(items, 1);
    }

    // Merge file-level parameters the module did not shadow, so later
    // phases have one lookup map.
    for (const auto& [k, v] : d_.file_params) {
      mod().params.emplace(k, v);
    }
    cur_mod_ = -1;
  }

  void walk_port_list(int plo) {
    if (alt(plo) != 0) return;
    int po = kid(plo, 1);
    if (alt(po) != 0) return;
    int pl = kid(po, 0);
    int port = kid(pl, 0);
    int tail = kid(pl, 1);
    for (;;) {
      walk_port(port);
      if (alt(tail) != 0) break;
      port = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  void walk_port(int node) {
    walk_port_type(kid(node, 1));
    Symbol s;
    s.kind = SymKind::Port;
    s.dir = direction_of(kid(node, 0));
    s.fam = port_family_hint(kid(node, 1));
    s.decl_node = node;
    s.decl_order = -1;
    s.name = decl_name(kid(node, 2));
    declare_in_module(std::move(s), kid(node, 2));
  }

  void walk_port_type(int node) {
    int range_opt = kid(node, alt(node) == 0 ? 2 : 1);
    walk_range_opt(range_opt);
  }

  void walk_range_opt(int range_opt) {
    if (alt(range_opt) != 0) return;
    int range = kid(range_opt, 0);
    walk_const_expr(kid(range, 1));
    walk_const_expr(kid(range, 3));
  }

  void walk_item(int node) {
    int inner = kid(node, 0);
    switch (alt(node)) {
      case 0: walk_net_or_var_decl(inner, SymKind::Net); break;
      case 1: walk_net_or_var_decl(inner, SymKind::Var); break;
      case 2: walk_localparam(inner, /*file_level=*/false); break;
      case 3:  // AssignItem
        walk_lvalue(kid(inner, 1), WriteKind::Continuous);
        walk_expression(kid(inner, 3), /*const_mode=*/false);
        break;
      case 4:  // AlwaysItem
        walk_event_expr(kid(inner, 3));
        walk_statement(kid(inner, 5));
        break;
      case 5:  // InitialItem
        walk_statement(kid(inner, 1));
        break;
      case 6: walk_function(inner); break;
      case 7: walk_gate(inner); break;
      default: walk_inst_or_struct(inner); break;
    }
  }

  void walk_net_or_var_decl(int node, SymKind kind) {
    // NetDecl: wire SignedOpt RangeOpt DeclrList ;
    // VarDecl: VarKw SignedOpt RangeOpt DeclrList ;
    walk_range_opt(kid(node, 2));
    int list = kid(node, 3);
    int declr = kid(list, 0);
    int tail = kid(list, 1);
    for (;;) {
      walk_declr(declr, kind, node);
      if (alt(tail) != 0) break;
      declr = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  void walk_declr(int node, SymKind kind, int decl_node) {
    int id_leaf = kid(node, 0);
    int init_opt = kid(node, 1);
    Symbol s;
    s.kind = kind;
    s.fam = kind == SymKind::Net ? FamilyHint::NetH : FamilyHint::VarH;
    s.decl_node = decl_node;
    s.decl_order = item_idx_;
    s.name = decl_name(id_leaf);

    bool has_init = alt(init_opt) == 0;
    if (mode_ == Mode::Generate) {
      // The self-reference coin: occasionally the initializer may see the
      // symbol it initializes.  The output stays parseable; semantic
      // checkers downstream are expected to object.
      bool declare_first = has_init && rng_->chance(opts_.self_ref_prob);
      if (declare_first) declare_in_module(s, id_leaf);
      if (has_init) walk_expression(kid(init_opt, 1), /*const_mode=*/false);
      if (!declare_first) declare_in_module(std::move(s), id_leaf);
    } else {
      if (has_init) {
        declaring_ = s.name;
        walk_expression(kid(init_opt, 1), /*const_mode=*/false);
        declaring_.clear();
      }
      declare_in_module(std::move(s), id_leaf);
    }
  }

  void walk_localparam(int node, bool file_level) {
    // localparam RangeOpt id = ConstExpr ;
    walk_range_opt(kid(node, 1));
    int id_leaf = kid(node, 2);
    int value_node = kid(node, 4);

    std::string name;
    if (mode_ == Mode::Generate) {
      name = mint();
      walk_const_expr(value_node);
      set_name(id_leaf, name);
    } else {
      name = lex(id_leaf);
      declaring_ = name;
      walk_const_expr(value_node);
      declaring_.clear();
    }

    std::optional<int64_t> value = fold_const(value_node);
    if (!value) {
      // Non-constant operands were already reported (or, in generation,
      // bailed); keep a value so later folds stay defined.
      value = 0;
    }

    Symbol s;
    s.kind = SymKind::Param;
    s.fam = FamilyHint::Open;
    s.decl_node = node;
    s.decl_order = item_idx_;
    s.name = name;

    if (file_level) {
      if (d_.file_params.count(name)) {
        violation(id_leaf, "duplicate declaration of '" + name + "'");
        return;
      }
      d_.file_params[name] = *value;
      file_param_syms_.push_back(std::move(s));
    } else {
      declare_in_module(std::move(s), id_leaf);
      mod().params[name] = *value;
    }
  }

  void walk_event_expr(int node) {
    if (alt(node) == 0) return;  // @(*)
    int item = kid(node, 0);
    int tail = kid(node, 1);
    for (;;) {
      int id_leaf = kid(item, alt(item) == 2 ? 0 : 1);
      resolve_use(id_leaf, edge_signal, "an event control signal");
      if (alt(tail) == 2) break;
      item = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  void walk_gate(int node) {
    // GateType id ( LValue , ExpressionList ) ;
    Symbol s;
    s.kind = SymKind::Instance;
    s.decl_node = node;
    s.decl_order = item_idx_;
    s.name = decl_name(kid(node, 1));
    declare_in_module(std::move(s), kid(node, 1));

    walk_lvalue(kid(node, 3), WriteKind::Continuous);
    int list = kid(node, 5);
    int expr = kid(list, 0);
    int tail = kid(list, 1);
    for (;;) {
      walk_expression(expr, /*const_mode=*/false);
      if (alt(tail) != 0) break;
      expr = kid(tail, 1);
      tail = kid(tail, 2);
    }
  }

  // --- instantiation --------------------------------------------------------

  // Peels the expression ladder: returns the identifier leaf when the
  // expression is exactly one bare identifier, else -1.
  int bare_id_leaf(int expr_node) const {
    int n = expr_node;  // Expression
    n = kid(n, 0);      // Ternary
    if (alt(kid(n, 1)) == 0) return -1;  // ?: used
    n = kid(n, 0);  // LorExpr
    for (int level = 0; level < 10; ++level) {
      if (alt(kid(n, 1)) != static_cast<int>(
              Grammar::get().rules_for(lhs(kid(n, 1))).size()) - 1) {
        return -1;  // tail used an operator alternative
      }
      n = kid(n, 0);
    }
    // n is now UnaryExpr
    if (alt(n) != 6) return -1;
    n = kid(n, 0);  // Primary
    if (alt(n) != 0) return -1;
    if (alt(kid(n, 1)) != 3) return -1;  // PrimaryTail must be empty
    return kid(n, 0);
  }

  struct ConnSlot {
    int expr_node;
    int port_leaf;  // named form only, else -1
  };

  void walk_inst_or_struct(int node) {
    int head_leaf = kid(node, 0);
    int inst_leaf = kid(node, 1);
    int tail = kid(node, 2);
    bool has_conns = alt(tail) == 0;

    if (mode_ == Mode::Generate) {
      generate_instantiation(node, head_leaf, inst_leaf, tail, has_conns);
      return;
    }
    check_instantiation(node, head_leaf, inst_leaf, tail, has_conns);
  }

  void generate_instantiation(int node, int head_leaf, int inst_leaf, int tail,
                              bool has_conns) {
    // Candidate heads: earlier modules keep the instantiation graph acyclic
    // by construction; struct types only make sense without a port list.
    std::vector<std::pair<std::string, bool>> heads;  // (name, is_struct)
    for (int i = 0; i < cur_mod_; ++i) heads.emplace_back(d_.modules[i].name, false);
    if (!has_conns) {
      for (const auto& st : d_.structs) heads.emplace_back(st.name, true);
    }
    if (heads.empty()) bail("no instantiable module or struct type in scope");
    auto [head_name, is_struct] = heads[rng_->below(heads.size())];
    set_name(head_leaf, head_name);

    Symbol s;
    s.kind = SymKind::Instance;
    s.instance_of = head_name;
    s.struct_instance = is_struct;
    s.decl_node = node;
    s.decl_order = item_idx_;
    s.name = decl_name(inst_leaf);

    if (has_conns && !is_struct) {
      const ModuleInfo& callee = d_.modules[d_.module_by_name.at(head_name)];
      resolve_connections(kid(tail, 1), callee);
    }
    declare_in_module(std::move(s), inst_leaf);
  }

  void resolve_connections(int conn_list_opt, const ModuleInfo& callee) {
    if (alt(conn_list_opt) != 0) return;  // () -- fully unconnected
    int conn_list = kid(conn_list_opt, 0);
    bool named = alt(conn_list) == 0;
    std::vector<ConnSlot> slots;
    if (named) {
      int list = kid(conn_list, 0);
      int conn = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        slots.push_back({kid(conn, 3), kid(conn, 1)});
        if (alt(tail) != 0) break;
        conn = kid(tail, 1);
        tail = kid(tail, 2);
      }
    } else {
      int list = kid(conn_list, 0);
      int expr = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        slots.push_back({expr, -1});
        if (alt(tail) != 0) break;
        expr = kid(tail, 1);
        tail = kid(tail, 2);
      }
    }

    std::vector<const Symbol*> ports;
    for (int pi : callee.ports) ports.push_back(&callee.symbols[pi]);

    if (named) {
      // Assign a distinct callee port to every connection such that
      // complex expressions land on inputs.
      if (slots.size() > ports.size()) bail("more connections than callee ports");
      std::vector<size_t> complex_slots, bare_slots;
      for (size_t i = 0; i < slots.size(); ++i) {
        (bare_id_leaf(slots[i].expr_node) >= 0 ? bare_slots : complex_slots).push_back(i);
      }
      std::vector<const Symbol*> in_ports, other_ports;
      for (const Symbol* p : ports) {
        (p->dir == Direction::In ? in_ports : other_ports).push_back(p);
      }
      if (complex_slots.size() > in_ports.size()) {
        bail("not enough input ports for complex connections");
      }
      shuffle(in_ports);
      std::vector<const Symbol*> assignment(slots.size(), nullptr);
      for (size_t i = 0; i < complex_slots.size(); ++i) {
        assignment[complex_slots[i]] = in_ports[i];
      }
      std::vector<const Symbol*> rest(in_ports.begin() + complex_slots.size(),
                                      in_ports.end());
      rest.insert(rest.end(), other_ports.begin(), other_ports.end());
      shuffle(rest);
      for (size_t i = 0; i < bare_slots.size(); ++i) {
        assignment[bare_slots[i]] = rest[i];
      }
      for (size_t i = 0; i < slots.size(); ++i) {
        set_name(slots[i].port_leaf, assignment[i]->name);
        resolve_conn_expr(slots[i].expr_node, assignment[i]->dir);
      }
    } else {
      if (slots.size() != ports.size()) {
        bail("positional connection count differs from port count");
      }
      for (size_t i = 0; i < slots.size(); ++i) {
        if (ports[i]->dir != Direction::In && bare_id_leaf(slots[i].expr_node) < 0) {
          bail("complex expression on an output position");
        }
        resolve_conn_expr(slots[i].expr_node, ports[i]->dir);
      }
    }
  }

  void resolve_conn_expr(int expr_node, Direction port_dir) {
    if (port_dir == Direction::In) {
      walk_expression(expr_node, /*const_mode=*/false);
      return;
    }
    // Output/inout: the connection drives a host symbol, so the bare
    // identifier must be continuously drivable.
    int leaf = bare_id_leaf(expr_node);
    assert(leaf >= 0);
    resolve_use(leaf, cont_target, "an output connection target");
  }

  void check_instantiation(int node, int head_leaf, int inst_leaf, int tail,
                           bool has_conns) {
    const std::string& head = lex(head_leaf);
    bool is_module = pre_modules_.count(head) > 0;
    bool is_struct = pre_structs_.count(head) > 0;
    if (!is_module && !is_struct) {
      violation(head_leaf, "unknown module or type '" + head + "'");
      return;
    }
    if (has_conns && !is_module) {
      violation(head_leaf, "'" + head + "' is not a module");
      return;
    }
    if (is_module && cur_mod_ >= 0 && head == mod().name) {
      violation(head_leaf, "module '" + head + "' instantiates itself");
    }

    Symbol s;
    s.kind = SymKind::Instance;
    s.instance_of = head;
    s.struct_instance = !is_module;
    s.decl_node = node;
    s.decl_order = item_idx_;
    s.name = lex(inst_leaf);
    declare_in_module(std::move(s), inst_leaf);

    if (!has_conns || !is_module) return;
    int conn_list_opt = kid(tail, 1);
    if (alt(conn_list_opt) != 0) return;
    int conn_list = kid(conn_list_opt, 0);
    const auto& ports = pre_module_ports_.at(head);

    if (alt(conn_list) == 0) {  // named
      std::set<std::string> used;
      int list = kid(conn_list, 0);
      int conn = kid(list, 0);
      int ctail = kid(list, 1);
      for (;;) {
        int port_leaf = kid(conn, 1);
        int expr = kid(conn, 3);
        const std::string& pname = lex(port_leaf);
        const Symbol* port = nullptr;
        for (const auto& p : ports) {
          if (p.name == pname) port = &p;
        }
        if (!port) {
          violation(port_leaf, "unknown port '" + pname + "' on module '" + head + "'");
        } else if (!used.insert(pname).second) {
          violation(port_leaf, "port '" + pname + "' connected twice");
        } else {
          check_conn_expr(expr, port);
        }
        if (alt(ctail) != 0) break;
        conn = kid(ctail, 1);
        ctail = kid(ctail, 2);
      }
    } else {  // positional
      std::vector<int> exprs;
      int list = kid(conn_list, 0);
      int expr = kid(list, 0);
      int ctail = kid(list, 1);
      for (;;) {
        exprs.push_back(expr);
        if (alt(ctail) != 0) break;
        expr = kid(ctail, 1);
        ctail = kid(ctail, 2);
      }
      if (exprs.size() != ports.size()) {
        violation(node, "positional connection count differs from port count of '" +
                            head + "'");
        return;
      }
      for (size_t i = 0; i < exprs.size(); ++i) check_conn_expr(exprs[i], &ports[i]);
    }
  }

  void check_conn_expr(int expr_node, const Symbol* port) {
    if (port->dir == Direction::In) {
      walk_expression(expr_node, /*const_mode=*/false);
      return;
    }
    int leaf = bare_id_leaf(expr_node);
    if (leaf < 0) {
      violation(expr_node,
                "output port '" + port->name + "' needs a simple identifier connection");
      return;
    }
    resolve_use(leaf, cont_target, "an output connection target");
  }

  // --- functions ------------------------------------------------------------

  void walk_function(int node) {
    // function SignedOpt RangeOpt id ( FuncPortsOpt ) ; Statement endfunction
    walk_range_opt(kid(node, 2));
    int id_leaf = kid(node, 3);
    std::string fn_name = decl_name(id_leaf);

    in_fn_ = true;
    fn_syms_.clear();
    fn_by_name_.clear();

    // The function's own name is its return slot: a variable inside the body.
    Symbol ret;
    ret.name = fn_name;
    ret.kind = SymKind::Var;
    ret.fam = FamilyHint::VarH;
    ret.decl_node = node;
    declare_in_fn(std::move(ret), id_leaf);

    int arity = 0;
    int fpo = kid(node, 5);
    if (alt(fpo) == 0) {
      int list = kid(fpo, 0);
      int fp = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        walk_port_type(kid(fp, 1));
        Symbol p;
        p.kind = SymKind::Port;
        p.dir = Direction::In;
        p.fam = port_family_hint(kid(fp, 1));
        p.decl_node = fp;
        p.name = decl_name(kid(fp, 2));
        declare_in_fn(std::move(p), kid(fp, 2));
        ++arity;
        if (alt(tail) != 0) break;
        fp = kid(tail, 1);
        tail = kid(tail, 2);
      }
    }

    walk_statement(kid(node, 8));

    in_fn_ = false;
    fn_syms_.clear();
    fn_by_name_.clear();

    Symbol s;
    s.kind = SymKind::Function;
    s.decl_node = node;
    s.decl_order = item_idx_;
    s.fn_arity = arity;
    s.name = fn_name;
    declare_in_module(std::move(s), id_leaf);
  }

  // --- typedef --------------------------------------------------------------

  void walk_typedef(int node) {
    StructInfo info;
    int id_leaf = kid(node, 6);

    int ml = kid(node, 4);
    int member = kid(ml, 0);
    int tail = kid(ml, 1);
    std::set<std::string> seen;
    for (;;) {
      // Member: NetOrVar SignedOpt RangeOpt id ;
      int range_opt = kid(member, 2);
      walk_range_opt(range_opt);
      StructMember sm;
      sm.is_signed = alt(kid(member, 1)) == 0;
      sm.width = 1;
      if (alt(range_opt) == 0) {
        int range = kid(range_opt, 0);
        auto msb = fold_const(kid(range, 1));
        auto lsb = fold_const(kid(range, 3));
        if (!msb || !lsb) {
          reject(range, "struct member range must be constant");
        } else if (*msb < *lsb) {
          reject(range, "struct member range is reversed");
        } else {
          sm.width = static_cast<int>(*msb - *lsb + 1);
        }
      }
      sm.name = decl_name(kid(member, 3));
      if (!seen.insert(sm.name).second) {
        violation(kid(member, 3), "duplicate declaration of '" + sm.name + "'");
      } else {
        info.members.push_back(std::move(sm));
      }
      if (alt(tail) != 0) break;
      member = kid(tail, 0);
      tail = kid(tail, 1);
    }

    info.name = decl_name(id_leaf);
    if (mode_ == Mode::Generate && d_.struct_by_name.count(info.name)) {
      bail("duplicate type name");
    }
    auto it = d_.struct_by_name.find(info.name);
    if (it != d_.struct_by_name.end()) {
      d_.structs[it->second] = std::move(info);  // pre-created entry (check mode)
    } else {
      d_.struct_by_name[info.name] = static_cast<int>(d_.structs.size());
      d_.structs.push_back(std::move(info));
    }
  }

  // --- statements -----------------------------------------------------------

  void walk_statement(int node) {
    int inner = kid(node, 0);
    switch (alt(node)) {
      case 0: {  // ProcAssign: LValue AssignRest
        walk_lvalue(kid(inner, 0), WriteKind::Procedural);
        walk_expression(kid(kid(inner, 1), 1), /*const_mode=*/false);
        break;
      }
      case 1: {  // IfStmt
        walk_expression(kid(inner, 2), false);
        walk_statement(kid(inner, 4));
        int else_opt = kid(inner, 5);
        if (alt(else_opt) == 0) walk_statement(kid(else_opt, 1));
        break;
      }
      case 2: {  // CaseStmt
        walk_expression(kid(inner, 2), false);
        int items = kid(inner, 4);
        int item = kid(items, 0);
        int tail = kid(items, 1);
        for (;;) {
          if (alt(item) == 0) walk_expression(kid(item, 0), false);
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

  void walk_lvalue(int node, WriteKind wk) {
    int id_leaf = kid(node, 0);
    int tail = kid(node, 1);
    const char* desc = wk == WriteKind::Continuous
                           ? "the target of a continuous assignment"
                           : "the target of a procedural assignment";
    switch (alt(tail)) {
      case 0: {  // . member
        int member_leaf = kid(tail, 1);
        Pred base_pred;
        MemberNeed need;
        if (wk == WriteKind::Continuous) {
          base_pred = module_instance;
          need = MemberNeed::WriteNet;
        } else {
          base_pred = hier_base_read;  // struct or module instance
          need = MemberNeed::WriteVar;
        }
        const Symbol* base = resolve_use(id_leaf, base_pred, "a hierarchical target base");
        if (base) resolve_member(member_leaf, *base, need);
        break;
      }
      case 1: {  // [ expr SelTail ]
        Pred p = wk == WriteKind::Continuous ? Pred(cont_target) : Pred(proc_target);
        resolve_use(id_leaf, p, desc);
        walk_select(kid(tail, 1), kid(tail, 2));
        break;
      }
      default: {
        Pred p = wk == WriteKind::Continuous ? Pred(cont_target) : Pred(proc_target);
        resolve_use(id_leaf, p, desc);
        break;
      }
    }
  }

  // A [expr] or [expr:expr] suffix.  Part-select bounds must be constants;
  // a plain index may be any expression.
  void walk_select(int index_expr, int sel_tail) {
    if (alt(sel_tail) == 0) {
      walk_expression(index_expr, /*const_mode=*/true);
      walk_expression(kid(sel_tail, 1), /*const_mode=*/true);
    } else {
      walk_expression(index_expr, /*const_mode=*/false);
    }
  }

  void resolve_member(int member_leaf, const Symbol& base, MemberNeed need) {
    if (mode_ == Mode::Generate) {
      auto name = member_from_tables(base, need);
      if (!name) bail("no member candidate in '" + base.instance_of + "'");
      set_name(member_leaf, *name);
      return;
    }
    if (base.struct_instance) {
      const auto& members = pre_struct_members_.at(base.instance_of);
      if (!members.count(lex(member_leaf))) {
        violation(member_leaf,
                  "'" + base.instance_of + "' has no member '" + lex(member_leaf) + "'");
      } else if (need == MemberNeed::WriteNet) {
        violation(member_leaf, "member '" + lex(member_leaf) + "' of '" + base.instance_of +
                                   "' cannot be driven that way");
      }
      return;
    }
    if (base.instance_of.empty()) {
      violation(member_leaf, "'" + base.name + "' has no members");
      return;
    }
    PendingMemberCheck p;
    p.callee = base.instance_of;
    p.member = lex(member_leaf);
    p.need = need;
    pos_of(member_leaf, &p.line, &p.col);
    deferred_.push_back(std::move(p));
  }

  std::optional<std::string> member_from_tables(const Symbol& base, MemberNeed need) const {
    std::vector<std::string> cands;
    if (base.struct_instance) {
      if (need != MemberNeed::WriteNet) {
        const StructInfo& st = d_.structs[d_.struct_by_name.at(base.instance_of)];
        for (const auto& m : st.members) cands.push_back(m.name);
      }
    } else if (!base.instance_of.empty()) {
      const ModuleInfo& callee = d_.modules[d_.module_by_name.at(base.instance_of)];
      for (const auto& s : callee.symbols) {
        bool ok = false;
        switch (need) {
          case MemberNeed::Read:
            ok = s.kind == SymKind::Net || s.kind == SymKind::Var || s.kind == SymKind::Port;
            break;
          case MemberNeed::WriteNet: ok = s.kind == SymKind::Net; break;
          case MemberNeed::WriteVar: ok = s.kind == SymKind::Var; break;
        }
        if (ok) cands.push_back(s.name);
      }
    }
    if (cands.empty()) return std::nullopt;
    return cands[rng_->below(cands.size())];
  }

  // --- expressions ----------------------------------------------------------

  void walk_const_expr(int node) {
    // ConstExpr: ConstTerm ConstExprTail
    walk_const_term(kid(node, 0));
    int tail = kid(node, 1);
    while (alt(tail) != 2) {
      walk_const_term(kid(tail, 1));
      tail = kid(tail, 2);
    }
  }

  void walk_const_term(int node) {
    if (alt(node) == 0) return;  // number
    int leaf = kid(node, 0);
    if (mode_ == Mode::Generate) {
      auto cands = collect(const_readable);
      if (cands.empty()) {
        // Fall back to a literal: rewrite this term to its number form.
        to_number_term(node);
        return;
      }
      set_name(leaf, cands[rng_->below(cands.size())]->name);
      return;
    }
    resolve_use(leaf, const_readable, "a constant");
  }

  void to_number_term(int node) {
    static const int number_rule = find_rule(NT::ConstTerm, {T(Tok::number)});
    Token tok;
    tok.kind = Tok::number;
    tok.lexeme = std::to_string(rng_->below(10));
    int leaf = t().add_leaf(std::move(tok));
    t().at(node).rule = number_rule;
    t().at(node).kids = {leaf};
  }

  void walk_expression(int node, bool const_mode) {
    // Expression -> Ternary
    walk_ternary_node(kid(node, 0), const_mode);
  }

  void walk_ternary_node(int ternary, bool const_mode) {
    int tail = kid(ternary, 1);
    if (alt(tail) == 0) {
      if (const_mode) {
        reject(ternary, "non-constant expression in constant position");
        if (mode_ == Mode::Check) return;
      }
      walk_binary(kid(ternary, 0), const_mode);
      walk_expression(kid(tail, 1), const_mode);
      walk_ternary_node(kid(tail, 3), const_mode);
    } else {
      walk_binary(kid(ternary, 0), const_mode);
    }
  }

  // Walks the binary ladder from LorExpr down to UnaryExpr.  In constant
  // mode only +/- chains are allowed; any other operator tail rejects.
  void walk_binary(int node, bool const_mode) {
    NT nt = lhs(node);
    if (nt == NT::UnaryExpr) {
      walk_unary(node, const_mode);
      return;
    }
    int operand = kid(node, 0);
    int tail = kid(node, 1);
    const auto& tail_alts = Grammar::get().rules_for(lhs(tail));
    int empty_alt = static_cast<int>(tail_alts.size()) - 1;
    bool tail_used = alt(tail) != empty_alt;
    if (const_mode && tail_used && lhs(tail) != NT::AddTail) {
      reject(tail, "non-constant expression in constant position");
      if (mode_ == Mode::Check) return;
    }
    walk_binary(operand, const_mode);
    while (alt(tail) != empty_alt) {
      walk_binary(kid(tail, 1), const_mode);
      tail = kid(tail, 2);
    }
  }

  void walk_unary(int node, bool const_mode) {
    if (alt(node) == 6) {
      walk_primary(kid(node, 0), const_mode);
      return;
    }
    // Operator form: only unary minus is a constant shape.
    if (const_mode && alt(node) != 2) {
      reject(node, "non-constant expression in constant position");
      if (mode_ == Mode::Check) return;
    }
    walk_unary(kid(node, 1), const_mode);
  }

  void walk_primary(int node, bool const_mode) {
    switch (alt(node)) {
      case 0: {  // identifier PrimaryTail
        walk_primary_ident(node, const_mode);
        break;
      }
      case 1:
      case 2:
        break;  // literals
      case 3:  // ( Expression )
        walk_expression(kid(node, 1), const_mode);
        break;
      default: {  // Concat
        if (const_mode) {
          reject(node, "non-constant expression in constant position");
          if (mode_ == Mode::Check) return;
        }
        int concat = kid(node, 0);
        walk_expression(kid(concat, 1), const_mode);
        int tail = kid(concat, 2);
        while (alt(tail) == 0) {
          walk_expression(kid(tail, 1), const_mode);
          tail = kid(tail, 2);
        }
        break;
      }
    }
  }

  void walk_primary_ident(int node, bool const_mode) {
    int id_leaf = kid(node, 0);
    int tail = kid(node, 1);
    switch (alt(tail)) {
      case 0: {  // . member
        if (const_mode) {
          reject(node, "non-constant expression in constant position");
          if (mode_ == Mode::Check) return;
        }
        const Symbol* base = resolve_use(id_leaf, hier_base_read, "a hierarchical base");
        if (base) resolve_member(kid(tail, 1), *base, MemberNeed::Read);
        break;
      }
      case 1: {  // [ expr SelTail ]
        if (const_mode) {
          reject(node, "non-constant expression in constant position");
          if (mode_ == Mode::Check) return;
        }
        resolve_use(id_leaf, readable, "a value");
        walk_select(kid(tail, 1), kid(tail, 2));
        break;
      }
      case 2: {  // ( args )
        if (const_mode) {
          reject(node, "non-constant expression in constant position");
          if (mode_ == Mode::Check) return;
        }
        walk_call(id_leaf, kid(tail, 1));
        break;
      }
      default: {  // bare identifier
        if (const_mode) {
          walk_const_primary_ident(node, id_leaf);
        } else {
          resolve_read_or_literal(node, id_leaf);
        }
        break;
      }
    }
  }

  void walk_const_primary_ident(int node, int id_leaf) {
    if (mode_ == Mode::Generate) {
      auto cands = collect(const_readable);
      if (cands.empty()) {
        to_number_primary(node);
        return;
      }
      set_name(id_leaf, cands[rng_->below(cands.size())]->name);
      return;
    }
    resolve_use(id_leaf, const_readable, "a constant");
  }

  void resolve_read_or_literal(int node, int id_leaf) {
    if (mode_ == Mode::Generate) {
      auto cands = collect(readable);
      if (cands.empty()) {
        to_sized_literal_primary(node);
        return;
      }
      set_name(id_leaf, cands[rng_->below(cands.size())]->name);
      return;
    }
    resolve_use(id_leaf, readable, "a value");
  }

  void to_number_primary(int node) {
    static const int rule = find_rule(NT::Primary, {T(Tok::number)});
    Token tok;
    tok.kind = Tok::number;
    tok.lexeme = std::to_string(rng_->below(10));
    int leaf = t().add_leaf(std::move(tok));
    t().at(node).rule = rule;
    t().at(node).kids = {leaf};
  }

  void to_sized_literal_primary(int node) {
    static const int rule = find_rule(NT::Primary, {T(Tok::sized_number)});
    static const int widths[4] = {1, 2, 4, 8};
    int w = widths[rng_->below(4)];
    uint64_t v = rng_->below(uint64_t{1} << w);
    Token tok;
    tok.kind = Tok::sized_number;
    tok.lexeme = std::to_string(w) + "'d" + std::to_string(v);
    int leaf = t().add_leaf(std::move(tok));
    t().at(node).rule = rule;
    t().at(node).kids = {leaf};
  }

  void walk_call(int fn_leaf, int call_args_opt) {
    std::vector<int> args;
    if (alt(call_args_opt) == 0) {
      int list = kid(call_args_opt, 0);
      int expr = kid(list, 0);
      int tail = kid(list, 1);
      for (;;) {
        args.push_back(expr);
        if (alt(tail) != 0) break;
        expr = kid(tail, 1);
        tail = kid(tail, 2);
      }
    }
    int nargs = static_cast<int>(args.size());

    if (mode_ == Mode::Generate) {
      auto cands = collect([nargs](const Symbol& s) {
        return s.kind == SymKind::Function && s.fn_arity == nargs;
      });
      if (cands.empty()) bail("no function of arity " + std::to_string(nargs));
      set_name(fn_leaf, cands[rng_->below(cands.size())]->name);
    } else {
      Miss miss;
      const Symbol* sym = lookup(lex(fn_leaf), &miss);
      if (!sym) {
        if (miss == Miss::NotVisibleInFn) {
          violation(fn_leaf, "'" + lex(fn_leaf) + "' is not visible inside a function");
        } else {
          violation(fn_leaf, "'" + lex(fn_leaf) + "' is undeclared");
        }
      } else if (sym->kind != SymKind::Function) {
        violation(fn_leaf, "'" + sym->name + "' is not a function");
      } else if (sym->fn_arity != nargs) {
        violation(fn_leaf, "function '" + sym->name + "' expects " +
                               std::to_string(sym->fn_arity) + " arguments");
      }
    }
    for (int a : args) walk_expression(a, /*const_mode=*/false);
  }

  template <class T2>
  void shuffle(std::vector<T2>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng_->below(i)]);
    }
  }
};

}  // namespace

Result<NamedDesign, ResolveFailure> resolve_scopes(const Tree& skeleton_tree, Rng& rng,
                                                   const ResolveOptions& opts) {
  Walker w(Mode::Generate, skeleton_tree, &rng, opts);
  try {
    w.run();
  } catch (const Bail& b) {
    return ResolveFailure{b.reason};
  }
  return w.take_design();
}

ScopeCheck check_scopes(const Tree& tree) {
  Walker w(Mode::Check, tree, nullptr, {});
  w.run();
  ScopeCheck out;
  out.violations = std::move(w.violations());
  if (out.violations.empty()) out.design = w.take_design();
  return out;
}

Result<std::string, ResolveFailure> resolve_namespace_member(const NamedDesign& design,
                                                             int module_idx,
                                                             const std::string& instance,
                                                             Rng& rng, MemberNeed need) {
  const ModuleInfo& m = design.modules[module_idx];
  const Symbol* base = m.find(instance);
  if (!base || base->kind != SymKind::Instance) {
    return ResolveFailure{"'" + instance + "' is not an instance"};
  }
  std::vector<std::string> cands;
  if (base->struct_instance) {
    if (need != MemberNeed::WriteNet) {
      const StructInfo* st = design.find_struct(base->instance_of);
      if (st) {
        for (const auto& sm : st->members) cands.push_back(sm.name);
      }
    }
  } else if (!base->instance_of.empty()) {
    const ModuleInfo* callee = design.find_module(base->instance_of);
    if (callee) {
      for (const auto& s : callee->symbols) {
        bool ok = false;
        switch (need) {
          case MemberNeed::Read:
            ok = s.kind == SymKind::Net || s.kind == SymKind::Var || s.kind == SymKind::Port;
            break;
          case MemberNeed::WriteNet: ok = s.kind == SymKind::Net; break;
          case MemberNeed::WriteVar: ok = s.kind == SymKind::Var; break;
        }
        if (ok) cands.push_back(s.name);
      }
    }
  }
  if (cands.empty()) {
    return ResolveFailure{"no member of '" + instance + "' fits"};
  }
  return cands[rng.below(cands.size())];
}

}  // namespace vgen
