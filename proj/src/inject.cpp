#include "vgen/inject.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "vgen/walk_util.hpp"

namespace vgen {

namespace {

std::string offset_id(const std::string& name, int off) {
  if (name.size() > 3 && name.compare(0, 3, "id_") == 0 &&
      std::all_of(name.begin() + 3, name.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    return "id_" + std::to_string(std::stoll(name.substr(3)) + off);
  }
  return name;
}

void remap_keys(std::map<std::string, int>& m, int off) {
  std::map<std::string, int> out;
  for (auto& [k, v] : m) out[offset_id(k, off)] = v;
  m = std::move(out);
}

void remap_params(std::map<std::string, int64_t>& m, int off) {
  std::map<std::string, int64_t> out;
  for (auto& [k, v] : m) out[offset_id(k, off)] = v;
  m = std::move(out);
}

}  // namespace

NamedDesign rename_design(NamedDesign d, int offset) {
  if (offset == 0) return d;
  for (int i = 0; i < d.tree.size(); ++i) {
    Node& n = d.tree.at(i);
    if (n.rule < 0 && n.tok.kind == Tok::identifier) {
      n.tok.lexeme = offset_id(n.tok.lexeme, offset);
    }
  }
  for (auto& m : d.modules) {
    m.name = offset_id(m.name, offset);
    remap_keys(m.by_name, offset);
    remap_params(m.params, offset);
    for (auto& s : m.symbols) {
      s.name = offset_id(s.name, offset);
      s.instance_of = offset_id(s.instance_of, offset);
    }
  }
  remap_keys(d.module_by_name, offset);
  for (auto& st : d.structs) {
    st.name = offset_id(st.name, offset);
    for (auto& mm : st.members) mm.name = offset_id(mm.name, offset);
  }
  remap_keys(d.struct_by_name, offset);
  remap_params(d.file_params, offset);
  d.next_id += offset;
  return d;
}

namespace {

int copy_subtree(const Tree& src, int node, Tree& dst, std::map<int, int>& node_map) {
  int d;
  if (src.is_leaf(node)) {
    d = dst.add_leaf(src.at(node).tok);
    dst.at(d).placeholder = src.at(node).placeholder;
    dst.at(d).ph_ord = src.at(node).ph_ord;
  } else {
    std::vector<int32_t> kids;
    kids.reserve(src.at(node).kids.size());
    for (int k : src.at(node).kids) kids.push_back(copy_subtree(src, k, dst, node_map));
    d = dst.add_node(src.at(node).rule);
    dst.at(d).kids = std::move(kids);
  }
  node_map[node] = d;
  return d;
}

int desc_cons_rule() {
  static const int r =
      find_rule(NT::DescriptionList, {N(NT::Description), N(NT::DescriptionList)});
  return r;
}

int desc_eps_rule() {
  static const int r = find_rule(NT::DescriptionList, {});
  return r;
}

}  // namespace

void append_design(NamedDesign& dst, const NamedDesign& src) {
  std::map<int, int> node_map;

  int list = dst.tree.at(dst.tree.root).kids[0];
  while (dst.tree.at(list).rule == desc_cons_rule()) list = dst.tree.at(list).kids[1];

  int src_list = src.tree.at(src.tree.root).kids[0];
  while (src.tree.at(src_list).rule == desc_cons_rule()) {
    int desc = copy_subtree(src.tree, src.tree.at(src_list).kids[0], dst.tree, node_map);
    int new_eps = dst.tree.add_node(desc_eps_rule());
    dst.tree.at(list).rule = desc_cons_rule();
    dst.tree.at(list).kids = {desc, new_eps};
    list = new_eps;
    src_list = src.tree.at(src_list).kids[1];
  }

  for (ModuleInfo m : src.modules) {
    m.node = node_map.at(m.node);
    for (auto& s : m.symbols) {
      auto it = node_map.find(s.decl_node);
      if (it != node_map.end()) s.decl_node = it->second;
    }
    dst.module_by_name[m.name] = static_cast<int>(dst.modules.size());
    dst.modules.push_back(std::move(m));
  }
  for (const StructInfo& st : src.structs) {
    dst.struct_by_name[st.name] = static_cast<int>(dst.structs.size());
    dst.structs.push_back(st);
  }
  for (auto& [k, v] : src.file_params) dst.file_params[k] = v;
  dst.next_id = std::max(dst.next_id, src.next_id);
}

namespace {

// Declared port type as a checker would read it: absent syntax means the
// language defaults.
ConcreteType read_concrete_port_type(const Tree& t, int port_type,
                                     const std::map<std::string, int64_t>& params) {
  ConcreteType c;
  int base = 0;
  if (walt(t, port_type) == 0) {
    c.family = walt(t, wkid(t, port_type, 0)) == 0 ? Family::Net : Family::Var;
    base = 1;
  }
  if (walt(t, wkid(t, port_type, base)) == 0) c.is_signed = true;
  int ro = wkid(t, port_type, base + 1);
  if (walt(t, ro) == 0) {
    int range = wkid(t, ro, 0);
    auto msb = fold_const_subtree(t, wkid(t, range, 1), params);
    auto lsb = fold_const_subtree(t, wkid(t, range, 3), params);
    if (msb && lsb && *msb >= *lsb) c.width = static_cast<int>(*msb - *lsb + 1);
  }
  return c;
}

Direction port_direction(const Tree& t, int port_node) {
  switch (walt(t, wkid(t, port_node, 0))) {
    case 0: return Direction::In;
    case 1: return Direction::Out;
    default: return Direction::Inout;
  }
}

}  // namespace

std::vector<PoolEntry> pool_entries(const NamedDesign& d) {
  std::vector<PoolEntry> out;
  for (const ModuleInfo& m : d.modules) {
    PoolEntry e;
    e.module_name = m.name;
    for (int pi : m.ports) {
      const Symbol& p = m.symbols[pi];
      PortSig sig;
      sig.name = p.name;
      sig.dir = p.dir;
      sig.type = read_concrete_port_type(d.tree, wkid(d.tree, p.decl_node, 1), m.params);
      e.ports.push_back(std::move(sig));
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::pair<int, int>> instantiation_edges(const NamedDesign& d) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < static_cast<int>(d.modules.size()); ++i) {
    for (const Symbol& s : d.modules[i].symbols) {
      if (s.kind != SymKind::Instance || s.struct_instance || s.instance_of.empty()) {
        continue;
      }
      auto it = d.module_by_name.find(s.instance_of);
      if (it != d.module_by_name.end()) edges.emplace_back(i, it->second);
    }
  }
  return edges;
}

bool instantiation_acyclic(const NamedDesign& d) {
  int n = static_cast<int>(d.modules.size());
  std::vector<std::vector<int>> adj(n);
  std::vector<int> indeg(n, 0);
  for (auto& [a, b] : instantiation_edges(d)) {
    adj[a].push_back(b);
    ++indeg[b];
  }
  std::vector<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  int done = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++done;
    for (int w : adj[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return done == n;
}

double gate_probability_from(const ProbabilityTable& table) {
  static const int gate_rule = find_rule(NT::Item, {N(NT::GateInst)});
  static const int inst_paren_rule =
      find_rule(NT::InstOrStructTail, {T(Tok::lparen), N(NT::ConnListOpt),
                                       T(Tok::rparen), T(Tok::semicolon)});
  uint64_t gates = 0;
  uint64_t insts = 0;
  for (const auto& [key, row] : table.observed_rows()) {
    for (const auto& [rule, count] : row.counts) {
      if (rule == gate_rule) gates += count;
      if (rule == inst_paren_rule) insts += count;
    }
  }
  if (gates + insts == 0) return 0.3;
  return static_cast<double>(gates) / static_cast<double>(gates + insts);
}

// --- item construction ------------------------------------------------------

namespace {

int build_expr_list(TreeBuilder& b, const std::vector<int>& exprs) {
  static const int cons =
      find_rule(NT::ExprListTail, {T(Tok::comma), N(NT::Expression), N(NT::ExprListTail)});
  static const int eps = find_rule(NT::ExprListTail, {});
  static const int head =
      find_rule(NT::ExpressionList, {N(NT::Expression), N(NT::ExprListTail)});
  int tail = b.node(eps, {});
  for (int i = static_cast<int>(exprs.size()) - 1; i >= 1; --i) {
    tail = b.node(cons, {b.leaf(Tok::comma), exprs[i], tail});
  }
  return b.node(head, {exprs[0], tail});
}

// `<gate> <name> ( <out> , <ins...> ) ;` as an Item.
int build_gate_item(Tree& t, int gate_alt, const std::string& name,
                    const std::string& out, const std::vector<std::string>& ins) {
  TreeBuilder b(t);
  static const int gate_rule = find_rule(
      NT::GateInst, {N(NT::GateType), T(Tok::identifier), T(Tok::lparen), N(NT::LValue),
                     T(Tok::comma), N(NT::ExpressionList), T(Tok::rparen), T(Tok::semicolon)});
  static const int item_rule = find_rule(NT::Item, {N(NT::GateInst)});
  static const Tok gate_toks[] = {Tok::kw_and, Tok::kw_or,   Tok::kw_xor, Tok::kw_nand,
                                  Tok::kw_nor, Tok::kw_xnor, Tok::kw_not, Tok::kw_buf};
  int type_rule = find_rule(NT::GateType, {T(gate_toks[gate_alt])});
  int type = b.node(type_rule, {b.leaf(gate_toks[gate_alt])});
  std::vector<int> in_exprs;
  for (const auto& s : ins) in_exprs.push_back(b.ident_expression(s));
  int gate = b.node(gate_rule, {type, b.identifier(name), b.leaf(Tok::lparen),
                                b.lvalue(out), b.leaf(Tok::comma),
                                build_expr_list(b, in_exprs), b.leaf(Tok::rparen),
                                b.leaf(Tok::semicolon)});
  return b.node(item_rule, {gate});
}

// `<module> <name> ( .p(a) , ... ) ;` as an Item.  Returns the Item node;
// `decl_out` receives the InstOrStructDecl node for symbol registration.
int build_instance_item(Tree& t, const std::string& module_name, const std::string& name,
                        const std::vector<std::pair<std::string, std::string>>& conns,
                        int* decl_out) {
  TreeBuilder b(t);
  static const int named_conn =
      find_rule(NT::NamedConn, {T(Tok::dot), T(Tok::identifier), T(Tok::lparen),
                                N(NT::Expression), T(Tok::rparen)});
  static const int conn_cons = find_rule(
      NT::NamedConnTail, {T(Tok::comma), N(NT::NamedConn), N(NT::NamedConnTail)});
  static const int conn_eps = find_rule(NT::NamedConnTail, {});
  static const int conn_head =
      find_rule(NT::NamedConnList, {N(NT::NamedConn), N(NT::NamedConnTail)});
  static const int conn_list_named = find_rule(NT::ConnList, {N(NT::NamedConnList)});
  static const int clo_full = find_rule(NT::ConnListOpt, {N(NT::ConnList)});
  static const int clo_empty = find_rule(NT::ConnListOpt, {});
  static const int tail_paren =
      find_rule(NT::InstOrStructTail, {T(Tok::lparen), N(NT::ConnListOpt), T(Tok::rparen),
                                       T(Tok::semicolon)});
  static const int decl_rule = find_rule(
      NT::InstOrStructDecl, {T(Tok::identifier), T(Tok::identifier), N(NT::InstOrStructTail)});
  static const int item_rule = find_rule(NT::Item, {N(NT::InstOrStructDecl)});

  int clo;
  if (conns.empty()) {
    clo = b.node(clo_empty, {});
  } else {
    auto make = [&](const std::pair<std::string, std::string>& c) {
      return b.node(named_conn, {b.leaf(Tok::dot), b.identifier(c.first),
                                 b.leaf(Tok::lparen), b.ident_expression(c.second),
                                 b.leaf(Tok::rparen)});
    };
    int tail = b.node(conn_eps, {});
    for (int i = static_cast<int>(conns.size()) - 1; i >= 1; --i) {
      tail = b.node(conn_cons, {b.leaf(Tok::comma), make(conns[i]), tail});
    }
    int list = b.node(conn_head, {make(conns[0]), tail});
    clo = b.node(clo_full, {b.node(conn_list_named, {list})});
  }
  int tail_node = b.node(tail_paren, {b.leaf(Tok::lparen), clo, b.leaf(Tok::rparen),
                                      b.leaf(Tok::semicolon)});
  int decl = b.node(decl_rule, {b.identifier(module_name), b.identifier(name), tail_node});
  if (decl_out) *decl_out = decl;
  return b.node(item_rule, {decl});
}

// `assign <lv> = <expr> ;` as an Item.
int build_assign_item(Tree& t, int lvalue_node, int expr_node) {
  TreeBuilder b(t);
  static const int assign_rule =
      find_rule(NT::AssignItem, {T(Tok::kw_assign), N(NT::LValue), T(Tok::assign_eq),
                                 N(NT::Expression), T(Tok::semicolon)});
  static const int item_rule = find_rule(NT::Item, {N(NT::AssignItem)});
  int a = b.node(assign_rule, {b.leaf(Tok::kw_assign), lvalue_node, b.leaf(Tok::assign_eq),
                               expr_node, b.leaf(Tok::semicolon)});
  return b.node(item_rule, {a});
}

// `initial <lv> = <expr> ;` as an Item.
int build_initial_assign_item(Tree& t, int lvalue_node, int expr_node) {
  TreeBuilder b(t);
  static const int rest_rule = find_rule(
      NT::AssignRest, {T(Tok::assign_eq), N(NT::Expression), T(Tok::semicolon)});
  static const int pa_rule = find_rule(NT::ProcAssign, {N(NT::LValue), N(NT::AssignRest)});
  static const int stmt_rule = find_rule(NT::Statement, {N(NT::ProcAssign)});
  static const int init_rule =
      find_rule(NT::InitialItem, {T(Tok::kw_initial), N(NT::Statement)});
  static const int item_rule = find_rule(NT::Item, {N(NT::InitialItem)});
  int rest = b.node(rest_rule, {b.leaf(Tok::assign_eq), expr_node, b.leaf(Tok::semicolon)});
  int pa = b.node(pa_rule, {lvalue_node, rest});
  int stmt = b.node(stmt_rule, {pa});
  int init = b.node(init_rule, {b.leaf(Tok::kw_initial), stmt});
  return b.node(item_rule, {init});
}

// `<fn> ( <args...> )` as an Expression.
int build_call_expr(Tree& t, const std::string& fn, const std::vector<std::string>& args) {
  TreeBuilder b(t);
  static const int primary_id = find_rule(NT::Primary, {T(Tok::identifier), N(NT::PrimaryTail)});
  static const int tail_call = find_rule(
      NT::PrimaryTail, {T(Tok::lparen), N(NT::CallArgsOpt), T(Tok::rparen)});
  static const int args_full = find_rule(NT::CallArgsOpt, {N(NT::ExpressionList)});
  static const int args_empty = find_rule(NT::CallArgsOpt, {});
  int cao;
  if (args.empty()) {
    cao = b.node(args_empty, {});
  } else {
    std::vector<int> exprs;
    for (const auto& a : args) exprs.push_back(b.ident_expression(a));
    cao = b.node(args_full, {build_expr_list(b, exprs)});
  }
  int tail = b.node(tail_call, {b.leaf(Tok::lparen), cao, b.leaf(Tok::rparen)});
  int primary = b.node(primary_id, {b.identifier(fn), tail});
  return b.wrap_primary_to_expression(primary);
}

int build_number_expr(Tree& t, uint64_t v) {
  TreeBuilder b(t);
  static const int primary_num = find_rule(NT::Primary, {T(Tok::number)});
  return b.wrap_primary_to_expression(b.node(primary_num, {b.number(v)}));
}

bool cont_drivable(const ReachingSym& s) {
  if (s.type.family != Family::Net) return false;
  return s.kind == SymKind::Net || (s.kind == SymKind::Port && s.dir != Direction::In);
}

bool proc_drivable(const ReachingSym& s) {
  if (s.type.family != Family::Var) return false;
  return s.kind == SymKind::Var || (s.kind == SymKind::Instance) ||
         (s.kind == SymKind::Port && s.dir == Direction::Out);
}

// Maximum bipartite matching (ports -> symbol indices), Kuhn's algorithm.
bool try_augment(int port, const std::vector<std::vector<int>>& cand,
                 std::vector<int>& sym_owner, std::vector<bool>& visited) {
  for (int s : cand[port]) {
    if (visited[s]) continue;
    visited[s] = true;
    if (sym_owner[s] < 0 || try_augment(sym_owner[s], cand, sym_owner, visited)) {
      sym_owner[s] = port;
      return true;
    }
  }
  return false;
}

// Assignment of one distinct symbol per port, or empty if impossible.
std::vector<int> match_ports(const std::vector<std::vector<int>>& cand, int n_syms) {
  std::vector<int> sym_owner(n_syms, -1);
  for (int p = 0; p < static_cast<int>(cand.size()); ++p) {
    std::vector<bool> visited(n_syms, false);
    if (!try_augment(p, cand, sym_owner, visited)) return {};
  }
  std::vector<int> port_sym(cand.size(), -1);
  for (int s = 0; s < n_syms; ++s) {
    if (sym_owner[s] >= 0) port_sym[sym_owner[s]] = s;
  }
  return port_sym;
}

}  // namespace

// --- engine -----------------------------------------------------------------

InjectionEngine::InjectionEngine(InjectionConfig cfg, uint64_t rng_seed)
    : cfg_(std::move(cfg)), rng_(rng_seed) {}

int InjectionEngine::tokens() const {
  return has_design_ ? typed_.design.tree.leaf_count() : 0;
}

std::string InjectionEngine::mint() {
  return "id_" + std::to_string(typed_.design.next_id++);
}

void InjectionEngine::absorb(const ValidDesign& atom) {
  NamedDesign renamed =
      rename_design(atom.typed.design, has_design_ ? typed_.design.next_id : 0);
  if (!has_design_) {
    typed_.design = renamed;
    has_design_ = true;
  } else {
    append_design(typed_.design, renamed);
  }
  for (PoolEntry& e : pool_entries(renamed)) pool_.push_back(std::move(e));

  auto r = infer(std::move(typed_.design), TypeFactMode::OpenFacets);
  if (!r.ok()) {
    throw std::runtime_error("internal: absorbed design failed to type: " +
                             r.error().message);
  }
  typed_ = std::move(r.value());
}

bool InjectionEngine::reinfer_or_revert(const TypedDesign& snapshot) {
  auto r = infer(std::move(typed_.design), TypeFactMode::OpenFacets);
  if (!r.ok()) {
    typed_ = snapshot;
    return false;
  }
  typed_ = std::move(r.value());
  return true;
}

void InjectionEngine::insert_item(int module_idx, int boundary, int item_node) {
  Tree& t = typed_.design.tree;
  static const int cons = find_rule(NT::ItemList, {N(NT::Item), N(NT::ItemList)});
  int list = wkid(t, typed_.design.modules[module_idx].node, 4);
  for (int i = 0; i < boundary; ++i) list = t.at(list).kids[1];
  int moved = t.add_node(t.at(list).rule);
  t.at(moved).kids = t.at(list).kids;
  t.at(list).rule = cons;
  t.at(list).kids = {item_node, moved};
}

void InjectionEngine::register_instance(int module_idx, const std::string& name,
                                        const std::string& instance_of, int decl_node,
                                        int boundary) {
  ModuleInfo& m = typed_.design.modules[module_idx];
  Symbol s;
  s.name = name;
  s.kind = SymKind::Instance;
  s.instance_of = instance_of;
  s.struct_instance = false;
  s.decl_node = decl_node;
  s.decl_order = boundary;
  m.by_name[s.name] = static_cast<int>(m.symbols.size());
  m.symbols.push_back(std::move(s));
}

bool InjectionEngine::creates_cycle(const std::string& callee, int host_idx) const {
  const std::string& host = typed_.design.modules[host_idx].name;
  std::vector<std::string> stack{callee};
  std::vector<bool> seen(typed_.design.modules.size(), false);
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (cur == host) return true;
    auto it = typed_.design.module_by_name.find(cur);
    if (it == typed_.design.module_by_name.end()) continue;
    if (seen[it->second]) continue;
    seen[it->second] = true;
    for (const Symbol& s : typed_.design.modules[it->second].symbols) {
      if (s.kind == SymKind::Instance && !s.struct_instance && !s.instance_of.empty()) {
        stack.push_back(s.instance_of);
      }
    }
  }
  return false;
}

bool InjectionEngine::gate_compatible(const Point& p) const {
  bool have_out = false;
  int readable_one_bit = 0;
  for (const ReachingSym& s : p.reaching) {
    if (s.type.width != 1) continue;
    ++readable_one_bit;
    if (cont_drivable(s)) have_out = true;
  }
  // The output pin plus at least one (possibly repeated) input pin.
  return have_out && readable_one_bit >= 2;
}

std::vector<int> InjectionEngine::matchable_pool(const Point& p) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pool_.size()); ++i) {
    const PoolEntry& e = pool_[i];
    if (e.consumed) continue;
    if (creates_cycle(e.module_name, p.module_idx)) continue;
    std::vector<std::vector<int>> cand(e.ports.size());
    bool feasible = true;
    for (size_t pi = 0; pi < e.ports.size(); ++pi) {
      const PortSig& sig = e.ports[pi];
      for (int si = 0; si < static_cast<int>(p.reaching.size()); ++si) {
        const ReachingSym& sym = p.reaching[si];
        if (sym.type.width != sig.type.width) continue;
        if (sym.type.family != sig.type.family) continue;
        if (sig.dir != Direction::In && !cont_drivable(sym)) continue;
        cand[pi].push_back(si);
      }
      if (cand[pi].empty()) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    if (match_ports(cand, static_cast<int>(p.reaching.size())).empty() &&
        !e.ports.empty()) {
      continue;
    }
    out.push_back(i);
  }
  return out;
}

bool InjectionEngine::place_gate(const Point& p) {
  std::vector<int> outs;
  std::vector<int> ins;
  for (int i = 0; i < static_cast<int>(p.reaching.size()); ++i) {
    if (p.reaching[i].type.width != 1) continue;
    if (cont_drivable(p.reaching[i])) outs.push_back(i);
    ins.push_back(i);
  }
  if (outs.empty() || ins.size() < 2) return false;
  int out = outs[rng_.below(outs.size())];
  std::vector<int> in_pool;
  for (int i : ins) {
    if (i != out) in_pool.push_back(i);
  }
  if (in_pool.empty()) return false;

  // not/buf take one input; the other six take two (repeats allowed).
  bool unary = rng_.chance(0.25);
  int gate_alt = unary ? 6 + static_cast<int>(rng_.below(2))
                       : static_cast<int>(rng_.below(6));
  std::vector<std::string> in_names;
  int n_in = unary ? 1 : 2;
  for (int i = 0; i < n_in; ++i) {
    in_names.push_back(p.reaching[in_pool[rng_.below(in_pool.size())]].name);
  }

  TypedDesign snapshot = typed_;
  std::string inst = mint();
  int item = build_gate_item(typed_.design.tree, gate_alt, inst,
                             p.reaching[out].name, in_names);
  int decl = typed_.design.tree.at(item).kids[0];
  insert_item(p.module_idx, p.boundary, item);
  register_instance(p.module_idx, inst, "", decl, p.boundary);
  return reinfer_or_revert(snapshot);
}

bool InjectionEngine::place_module(const Point& p, int pool_idx) {
  PoolEntry& e = pool_[pool_idx];
  std::vector<std::vector<int>> cand(e.ports.size());
  for (size_t pi = 0; pi < e.ports.size(); ++pi) {
    const PortSig& sig = e.ports[pi];
    for (int si = 0; si < static_cast<int>(p.reaching.size()); ++si) {
      const ReachingSym& sym = p.reaching[si];
      if (sym.type.width != sig.type.width) continue;
      if (sym.type.family != sig.type.family) continue;
      if (sig.dir != Direction::In && !cont_drivable(sym)) continue;
      cand[pi].push_back(si);
    }
    // Randomize which symbol the augmenting search reaches first.
    for (size_t j = cand[pi].size(); j > 1; --j) {
      std::swap(cand[pi][j - 1], cand[pi][rng_.below(j)]);
    }
  }
  std::vector<int> port_sym = match_ports(cand, static_cast<int>(p.reaching.size()));
  if (port_sym.empty() && !e.ports.empty()) return false;

  std::vector<std::pair<std::string, std::string>> conns;
  for (size_t pi = 0; pi < e.ports.size(); ++pi) {
    conns.emplace_back(e.ports[pi].name, p.reaching[port_sym[pi]].name);
  }

  TypedDesign snapshot = typed_;
  std::string inst = mint();
  int decl = -1;
  int item = build_instance_item(typed_.design.tree, e.module_name, inst, conns, &decl);
  insert_item(p.module_idx, p.boundary, item);
  register_instance(p.module_idx, inst, e.module_name, decl, p.boundary);
  if (!reinfer_or_revert(snapshot)) return false;
  e.consumed = true;
  return true;
}

bool InjectionEngine::inject_instantiation(GrowStats* stats) {
  std::vector<Point> gate_pts;
  std::vector<Point> inst_pts;
  for (int m = 0; m < static_cast<int>(typed_.design.modules.size()); ++m) {
    ModuleReaching r = reaching_map(typed_, m);
    for (size_t b = 0; b < r.at_boundary.size(); ++b) {
      Point p{m, static_cast<int>(b), r.at_boundary[b]};
      if (gate_compatible(p)) gate_pts.push_back(p);
      if (!matchable_pool(p).empty()) inst_pts.push_back(std::move(p));
    }
  }

  bool want_gate = rng_.chance(cfg_.gate_probability);
  if ((want_gate || inst_pts.empty()) && !gate_pts.empty()) {
    const Point& p = gate_pts[rng_.below(gate_pts.size())];
    if (place_gate(p)) {
      if (stats) ++stats->gate_injections;
      return true;
    }
    return false;
  }
  if (!inst_pts.empty()) {
    const Point& p = inst_pts[rng_.below(inst_pts.size())];
    std::vector<int> fits = matchable_pool(p);
    // Random scan order; the first that still matches wins.
    for (size_t j = fits.size(); j > 1; --j) {
      std::swap(fits[j - 1], fits[rng_.below(j)]);
    }
    for (int idx : fits) {
      if (place_module(p, idx)) {
        if (stats) ++stats->module_injections;
        return true;
      }
    }
  }
  return false;
}

namespace {

struct FnSig {
  int ret_width = 1;
  std::vector<ConcreteType> ports;
};

FnSig read_fn_sig(const Tree& t, int fn_node, const std::map<std::string, int64_t>& params) {
  FnSig sig;
  int ro = wkid(t, fn_node, 2);
  if (walt(t, ro) == 0) {
    int range = wkid(t, ro, 0);
    auto msb = fold_const_subtree(t, wkid(t, range, 1), params);
    auto lsb = fold_const_subtree(t, wkid(t, range, 3), params);
    if (msb && lsb && *msb >= *lsb) sig.ret_width = static_cast<int>(*msb - *lsb + 1);
  }
  int fpo = wkid(t, fn_node, 5);
  if (walt(t, fpo) == 0) {
    int list = wkid(t, fpo, 0);
    int fp = wkid(t, list, 0);
    int tail = wkid(t, list, 1);
    for (;;) {
      sig.ports.push_back(read_concrete_port_type(t, wkid(t, fp, 1), params));
      if (walt(t, tail) != 0) break;
      fp = wkid(t, tail, 1);
      tail = wkid(t, tail, 2);
    }
  }
  return sig;
}

int count_items(const Tree& t, int module_node) {
  int n = 0;
  int list = wkid(t, module_node, 4);
  while (walt(t, list) == 0) {
    ++n;
    list = wkid(t, list, 1);
  }
  return n;
}

}  // namespace

bool InjectionEngine::inject_function_call(GrowStats* stats) {
  const NamedDesign& d = typed_.design;
  std::vector<std::pair<int, int>> fns;  // (module idx, symbol idx)
  for (int m = 0; m < static_cast<int>(d.modules.size()); ++m) {
    for (int s = 0; s < static_cast<int>(d.modules[m].symbols.size()); ++s) {
      if (d.modules[m].symbols[s].kind == SymKind::Function) fns.emplace_back(m, s);
    }
  }
  for (size_t j = fns.size(); j > 1; --j) {
    std::swap(fns[j - 1], fns[rng_.below(j)]);
  }

  for (auto& [m, si] : fns) {
    const ModuleInfo& host = d.modules[m];
    const Symbol& fn = host.symbols[si];
    FnSig sig = read_fn_sig(d.tree, fn.decl_node, host.params);

    int end = count_items(d.tree, host.node);
    ModuleReaching r = reaching_map(typed_, m);
    const auto& reach = r.at_boundary[end];

    std::vector<const ReachingSym*> tgts;
    for (const ReachingSym& s : reach) {
      if (proc_drivable(s) && s.type.width == sig.ret_width) tgts.push_back(&s);
    }
    if (tgts.empty()) continue;

    std::vector<std::string> args;
    bool ok = true;
    for (const ConcreteType& pt : sig.ports) {
      std::vector<const ReachingSym*> cands;
      for (const ReachingSym& s : reach) {
        if (s.type.width == pt.width && s.type.family == pt.family) cands.push_back(&s);
      }
      if (cands.empty()) {
        ok = false;
        break;
      }
      args.push_back(cands[rng_.below(cands.size())]->name);
    }
    if (!ok) continue;

    const std::string& tgt = tgts[rng_.below(tgts.size())]->name;
    TypedDesign snapshot = typed_;
    Tree& t = typed_.design.tree;
    TreeBuilder b(t);
    int expr = build_call_expr(t, fn.name, args);
    int item = build_initial_assign_item(t, b.lvalue(tgt), expr);
    insert_item(m, end, item);
    if (!reinfer_or_revert(snapshot)) continue;
    if (stats) ++stats->call_injections;
    return true;
  }
  return false;
}

bool InjectionEngine::inject_hier_ref(GrowStats* stats) {
  const NamedDesign& d = typed_.design;
  std::vector<std::pair<int, int>> insts;  // (module idx, symbol idx)
  for (int m = 0; m < static_cast<int>(d.modules.size()); ++m) {
    for (int s = 0; s < static_cast<int>(d.modules[m].symbols.size()); ++s) {
      const Symbol& sym = d.modules[m].symbols[s];
      if (sym.kind == SymKind::Instance && !sym.struct_instance &&
          !sym.instance_of.empty() && d.find_module(sym.instance_of)) {
        insts.emplace_back(m, s);
      }
    }
  }
  for (size_t j = insts.size(); j > 1; --j) {
    std::swap(insts[j - 1], insts[rng_.below(j)]);
  }

  for (auto& [m, si] : insts) {
    const ModuleInfo& host = d.modules[m];
    const Symbol& inst = host.symbols[si];
    int callee_idx = d.module_by_name.at(inst.instance_of);
    int end = count_items(d.tree, host.node);

    bool write_first = rng_.chance(0.5);
    for (int attempt = 0; attempt < 2; ++attempt) {
      bool write = (attempt == 0) == write_first;
      if (write) {
        auto member = resolve_namespace_member(d, m, inst.name, rng_, MemberNeed::WriteNet);
        if (!member.ok()) continue;
        TypedDesign snapshot = typed_;
        Tree& t = typed_.design.tree;
        TreeBuilder b(t);
        int item = build_assign_item(t, b.hier_lvalue(inst.name, member.value()),
                                     build_number_expr(t, 1));
        insert_item(m, end, item);
        if (!reinfer_or_revert(snapshot)) continue;
        if (stats) ++stats->hier_injections;
        return true;
      }
      auto member = resolve_namespace_member(d, m, inst.name, rng_, MemberNeed::Read);
      if (!member.ok()) continue;
      const ConcreteType* mt = typed_.type_of(callee_idx, member.value());
      if (!mt) continue;

      ModuleReaching r = reaching_map(typed_, m);
      const auto& reach = r.at_boundary[end];
      std::vector<const ReachingSym*> tgts;
      for (const ReachingSym& s : reach) {
        if (s.type.width != mt->width) continue;
        if (mt->family == Family::Net ? cont_drivable(s) : proc_drivable(s)) {
          tgts.push_back(&s);
        }
      }
      if (tgts.empty()) continue;
      const std::string& tgt = tgts[rng_.below(tgts.size())]->name;

      TypedDesign snapshot = typed_;
      Tree& t = typed_.design.tree;
      TreeBuilder b(t);
      int expr = b.hier_expression(inst.name, member.value());
      int item = mt->family == Family::Net
                     ? build_assign_item(t, b.lvalue(tgt), expr)
                     : build_initial_assign_item(t, b.lvalue(tgt), expr);
      insert_item(m, end, item);
      if (!reinfer_or_revert(snapshot)) continue;
      if (stats) ++stats->hier_injections;
      return true;
    }
  }
  return false;
}

bool InjectionEngine::try_inject(InjectionKind kind, GrowStats* stats) {
  if (!has_design_) return false;
  bool ok = false;
  switch (kind) {
    case InjectionKind::Instantiation: ok = inject_instantiation(stats); break;
    case InjectionKind::FunctionCall: ok = inject_function_call(stats); break;
    case InjectionKind::HierRef: ok = inject_hier_ref(stats); break;
  }
  if (ok && stats) ++stats->injections;
  return ok;
}

Result<GrownDesign, GrowFailure> grow_design(const ProbabilityTable& table, uint64_t seed,
                                             const InjectionConfig& cfg) {
  InjectionEngine eng(cfg, mix64(seed ^ 0x1ec7edba11adULL));
  Rng kind_rng(mix64(seed ^ 0x5ca77e2ed1ceULL));
  GrowStats stats;
  uint64_t s = seed;
  int stall = 0;

  while (eng.tokens() < cfg.token_budget) {
    if (stats.iterations >= cfg.max_iterations) {
      return GrowFailure{"iteration cap reached before the token budget", stats};
    }
    if (stall >= cfg.stall_limit) {
      return GrowFailure{"budget stalled: " + std::to_string(cfg.stall_limit) +
                             " consecutive iterations added no tokens",
                         stats};
    }
    ++stats.iterations;
    int before = eng.tokens();

    auto atom = generate_valid_design(table, s, cfg.atom);
    if (!atom.ok()) {
      stats.atoms += atom.error().stats;
      s = mix64(s ^ 0x9e3779b97f4a7c15ULL);
      ++stall;
      continue;
    }
    stats.atoms += atom.value().stats;
    s = next_seed(atom.value().seed);
    eng.absorb(atom.value());
    if (eng.tokens() >= cfg.token_budget) break;

    double total = cfg.w_instantiation + cfg.w_function_call + cfg.w_hier_ref;
    InjectionKind kind = InjectionKind::Instantiation;
    if (total > 0) {
      double u = kind_rng.next_double() * total;
      if (u < cfg.w_instantiation) {
        kind = InjectionKind::Instantiation;
      } else if (u < cfg.w_instantiation + cfg.w_function_call) {
        kind = InjectionKind::FunctionCall;
      } else {
        kind = InjectionKind::HierRef;
      }
    }
    eng.try_inject(kind, &stats);

    stall = (eng.tokens() == before) ? stall + 1 : 0;
  }

  GrownDesign g;
  g.typed = eng.typed();
  g.seed = seed;
  g.stats = stats;
  return g;
}

}  // namespace vgen
