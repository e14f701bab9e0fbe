#include "vgen/reaching.hpp"

#include <algorithm>

#include "vgen/walk_util.hpp"

namespace vgen {

namespace {

// Definitions a node ends up exposing (last write per symbol wins) and the
// full set of definition ids it suppresses.
void gen_kill(const Cfg& cfg, int n, std::vector<bool>* gen, std::vector<bool>* kill) {
  int nd = static_cast<int>(cfg.def_symbol.size());
  gen->assign(nd, false);
  kill->assign(nd, false);
  const auto& defs = cfg.nodes[n].defs;
  for (int d : defs) {
    int sym = cfg.def_symbol[d];
    for (int other = 0; other < nd; ++other) {
      if (cfg.def_symbol[other] == sym) (*kill)[other] = true;
    }
  }
  // Execution order: a later def of the same symbol shadows an earlier one
  // within the node.
  for (int d : defs) {
    int sym = cfg.def_symbol[d];
    for (int e : defs) {
      if (cfg.def_symbol[e] == sym) (*gen)[e] = false;
    }
    (*gen)[d] = true;
  }
  for (int d = 0; d < nd; ++d) {
    if ((*gen)[d]) (*kill)[d] = false;
  }
}

}  // namespace

std::vector<std::vector<bool>> solve_reaching(const Cfg& cfg) {
  int nn = static_cast<int>(cfg.nodes.size());
  int nd = static_cast<int>(cfg.def_symbol.size());
  std::vector<std::vector<bool>> gen(nn), kill(nn);
  for (int n = 0; n < nn; ++n) gen_kill(cfg, n, &gen[n], &kill[n]);

  std::vector<std::vector<bool>> in(nn, std::vector<bool>(nd, false));
  std::vector<std::vector<bool>> out(nn, std::vector<bool>(nd, false));

  bool changed = true;
  while (changed) {
    changed = false;
    for (int n = 0; n < nn; ++n) {
      for (int d = 0; d < nd; ++d) {
        bool o = gen[n][d] || (in[n][d] && !kill[n][d]);
        if (o != out[n][d]) {
          out[n][d] = o;
          changed = true;
        }
      }
      for (int s : cfg.nodes[n].succ) {
        for (int d = 0; d < nd; ++d) {
          if (out[n][d] && !in[s][d]) {
            in[s][d] = true;
            changed = true;
          }
        }
      }
    }
  }
  return in;
}

namespace {

// Does `d` survive node `n` when the walk enters past it?  (Interior nodes
// of a path kill; a def of the same symbol later in the node also kills.)
bool killed_by(const Cfg& cfg, int n, int d) {
  int sym = cfg.def_symbol[d];
  for (int e : cfg.nodes[n].defs) {
    if (cfg.def_symbol[e] == sym) return true;
  }
  return false;
}

// Is `d` the definition node `m` exposes for its symbol (no later def of
// the same symbol inside m)?
bool exposed_by(const Cfg& cfg, int m, int d) {
  const auto& defs = cfg.nodes[m].defs;
  auto it = std::find(defs.begin(), defs.end(), d);
  if (it == defs.end()) return false;
  for (auto j = it + 1; j != defs.end(); ++j) {
    if (cfg.def_symbol[*j] == cfg.def_symbol[d]) return false;
  }
  return true;
}

// Simple-path search m -> target avoiding interior kills of d's symbol.
bool path_exists(const Cfg& cfg, int from, int target, int d,
                 std::vector<bool>& visited) {
  for (int s : cfg.nodes[from].succ) {
    if (s == target) return true;
    if (visited[s] || killed_by(cfg, s, d)) continue;
    visited[s] = true;
    if (path_exists(cfg, s, target, d, visited)) return true;
    visited[s] = false;
  }
  return false;
}

}  // namespace

std::vector<std::vector<bool>> enumerate_reaching(const Cfg& cfg) {
  int nn = static_cast<int>(cfg.nodes.size());
  int nd = static_cast<int>(cfg.def_symbol.size());
  std::vector<std::vector<bool>> in(nn, std::vector<bool>(nd, false));
  for (int d = 0; d < nd; ++d) {
    for (int m = 0; m < nn; ++m) {
      if (!exposed_by(cfg, m, d)) continue;
      for (int p = 0; p < nn; ++p) {
        if (in[p][d]) continue;
        std::vector<bool> visited(nn, false);
        visited[m] = true;  // interior nodes must differ from the source
        if (path_exists(cfg, m, p, d, visited)) in[p][d] = true;
      }
    }
  }
  return in;
}

// --- module map -------------------------------------------------------------

namespace {

class CfgBuilder {
 public:
  CfgBuilder(const TypedDesign& td, int module_idx)
      : td_(td), t_(td.design.tree), mod_(td.design.modules[module_idx]),
        midx_(module_idx) {}

  ModuleReaching build() {
    // Typed symbols participate; everything else (params, functions,
    // module instances) is outside the value flow.
    for (const Symbol& s : mod_.symbols) {
      if (td_.symbol_types[mod_index()].count(s.name)) {
        sym_index_[s.name] = static_cast<int>(sym_order_.size());
        sym_order_.push_back(&s);
      }
    }

    int entry = new_node();
    for (const Symbol& s : mod_.symbols) {
      if (s.kind == SymKind::Port) add_def(entry, s.name);
    }

    int items = wkid(t_, mod_.node, 4);
    int cursor = entry;
    std::vector<int> tails;  // CFG node whose out-set each boundary reads
    while (walt(t_, items) == 0) {
      tails.push_back(cursor);
      cursor = add_item(wkid(t_, items, 0), cursor);
      items = wkid(t_, items, 1);
    }
    tails.push_back(cursor);

    auto in = solve_reaching(cfg_);
    // Boundary b needs the out-set of the node before it: re-derive it by
    // reusing the chain through a synthetic sink per boundary would bloat
    // the graph; instead recompute out from in locally.
    ModuleReaching out;
    out.at_boundary.resize(tails.size());
    for (size_t b = 0; b < tails.size(); ++b) {
      out.at_boundary[b] = syms_at(node_out(tails[b], in));
    }
    for (auto& [stmt_node, cfg_node] : stmt_nodes_) {
      out.at_statement[stmt_node] = syms_at(in[cfg_node]);
    }
    return out;
  }

 private:
  const TypedDesign& td_;
  const Tree& t_;
  const ModuleInfo& mod_;
  int midx_;

  Cfg cfg_;
  std::map<std::string, int> sym_index_;
  std::vector<const Symbol*> sym_order_;
  std::vector<std::pair<int, int>> stmt_nodes_;  // (tree node, cfg node)

  int mod_index() const { return midx_; }

  int new_node() {
    cfg_.nodes.emplace_back();
    return static_cast<int>(cfg_.nodes.size()) - 1;
  }

  void edge(int a, int b) { cfg_.nodes[a].succ.push_back(b); }

  void add_def(int node, const std::string& name) {
    auto it = sym_index_.find(name);
    if (it == sym_index_.end()) return;
    int d = static_cast<int>(cfg_.def_symbol.size());
    cfg_.def_symbol.push_back(it->second);
    cfg_.nodes[node].defs.push_back(d);
  }

  std::vector<bool> node_out(int n, const std::vector<std::vector<bool>>& in) {
    std::vector<bool> gen, kill;
    gen_kill(cfg_, n, &gen, &kill);
    std::vector<bool> o(cfg_.def_symbol.size(), false);
    for (size_t d = 0; d < o.size(); ++d) {
      o[d] = gen[d] || (in[n][d] && !kill[d]);
    }
    return o;
  }

  std::vector<ReachingSym> syms_at(const std::vector<bool>& defs) {
    std::vector<bool> seen(sym_order_.size(), false);
    for (size_t d = 0; d < defs.size(); ++d) {
      if (defs[d]) seen[cfg_.def_symbol[d]] = true;
    }
    std::vector<ReachingSym> out;
    for (size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) continue;
      const Symbol& s = *sym_order_[i];
      ReachingSym r;
      r.name = s.name;
      r.kind = s.kind;
      r.dir = s.dir;
      r.type = *td_.type_of(mod_index(), s.name);
      out.push_back(std::move(r));
    }
    return out;
  }

  // The base symbol an LValue writes, or "" for hierarchical targets
  // (those write into another namespace).
  std::string lvalue_base(int lv) {
    if (walt(t_, wkid(t_, lv, 1)) == 0) return "";
    return wlex(t_, wkid(t_, lv, 0));
  }

  // Appends the item's subgraph after `pred`; returns the new exit node.
  int add_item(int item, int pred) {
    int inner = wkid(t_, item, 0);
    switch (walt(t_, item)) {
      case 0:
      case 1: {  // declarations: every declarator defines
        int n = new_node();
        edge(pred, n);
        int list = wkid(t_, inner, 3);
        int declr = wkid(t_, list, 0);
        int tail = wkid(t_, list, 1);
        for (;;) {
          add_def(n, wlex(t_, wkid(t_, declr, 0)));
          if (walt(t_, tail) != 0) break;
          declr = wkid(t_, tail, 1);
          tail = wkid(t_, tail, 2);
        }
        return n;
      }
      case 3: {  // assign
        int n = new_node();
        edge(pred, n);
        add_def(n, lvalue_base(wkid(t_, inner, 1)));
        return n;
      }
      case 4: return add_statement(wkid(t_, inner, 5), pred);  // always
      case 5: return add_statement(wkid(t_, inner, 1), pred);  // initial
      case 7: {  // gate: drives its output pin
        int n = new_node();
        edge(pred, n);
        add_def(n, lvalue_base(wkid(t_, inner, 3)));
        return n;
      }
      case 8: {  // instance: struct declares; module drives output conns
        int n = new_node();
        edge(pred, n);
        const Symbol* inst = mod_.find(wlex(t_, wkid(t_, inner, 1)));
        if (inst && inst->struct_instance) {
          add_def(n, inst->name);
        } else if (inst) {
          add_instance_output_defs(inner, *inst, n);
        }
        return n;
      }
      default: {  // localparam, function: no value flow
        int n = new_node();
        edge(pred, n);
        return n;
      }
    }
  }

  void add_instance_output_defs(int node, const Symbol& inst, int cfg_node) {
    const ModuleInfo* callee = td_.design.find_module(inst.instance_of);
    if (!callee) return;
    int tail = wkid(t_, node, 2);
    if (walt(t_, tail) != 0) return;
    int clo = wkid(t_, tail, 1);
    if (walt(t_, clo) != 0) return;
    int conn_list = wkid(t_, clo, 0);
    auto consider = [&](int expr, const Symbol& port) {
      if (port.dir == Direction::In) return;
      int leaf = wbare_id_leaf(t_, expr);
      if (leaf >= 0) add_def(cfg_node, wlex(t_, leaf));
    };
    if (walt(t_, conn_list) == 0) {
      int list = wkid(t_, conn_list, 0);
      int conn = wkid(t_, list, 0);
      int ctail = wkid(t_, list, 1);
      for (;;) {
        const Symbol* port = callee->find(wlex(t_, wkid(t_, conn, 1)));
        if (port) consider(wkid(t_, conn, 3), *port);
        if (walt(t_, ctail) != 0) break;
        conn = wkid(t_, ctail, 1);
        ctail = wkid(t_, ctail, 2);
      }
    } else {
      int list = wkid(t_, conn_list, 0);
      int expr = wkid(t_, list, 0);
      int ctail = wkid(t_, list, 1);
      size_t i = 0;
      for (;;) {
        if (i < callee->ports.size()) {
          consider(expr, callee->symbols[callee->ports[i]]);
        }
        ++i;
        if (walt(t_, ctail) != 0) break;
        expr = wkid(t_, ctail, 1);
        ctail = wkid(t_, ctail, 2);
      }
    }
  }

  int add_statement(int stmt, int pred) {
    int inner = wkid(t_, stmt, 0);
    switch (walt(t_, stmt)) {
      case 0: {  // procedural assignment
        int n = new_node();
        stmt_nodes_.push_back({stmt, n});
        edge(pred, n);
        add_def(n, lvalue_base(wkid(t_, inner, 0)));
        return n;
      }
      case 1: {  // if / if-else: branches rejoin
        int cond = new_node();
        stmt_nodes_.push_back({stmt, cond});
        edge(pred, cond);
        int join = new_node();
        int then_exit = add_statement(wkid(t_, inner, 4), cond);
        edge(then_exit, join);
        int else_opt = wkid(t_, inner, 5);
        if (walt(t_, else_opt) == 0) {
          int else_exit = add_statement(wkid(t_, else_opt, 1), cond);
          edge(else_exit, join);
        } else {
          edge(cond, join);
        }
        return join;
      }
      case 2: {  // case: one arm per item; no arm may match
        int subj = new_node();
        stmt_nodes_.push_back({stmt, subj});
        edge(pred, subj);
        int join = new_node();
        edge(subj, join);  // fall-through when nothing matches
        int items = wkid(t_, inner, 4);
        int item = wkid(t_, items, 0);
        int tail = wkid(t_, items, 1);
        for (;;) {
          int exit = add_statement(wkid(t_, item, 2), subj);
          edge(exit, join);
          if (walt(t_, tail) != 0) break;
          item = wkid(t_, tail, 0);
          tail = wkid(t_, tail, 1);
        }
        return join;
      }
      default: {  // begin ... end
        int entry = new_node();
        stmt_nodes_.push_back({stmt, entry});
        edge(pred, entry);
        int cursor = entry;
        int list = wkid(t_, inner, 1);
        while (walt(t_, list) == 0) {
          cursor = add_statement(wkid(t_, list, 0), cursor);
          list = wkid(t_, list, 1);
        }
        return cursor;
      }
    }
  }
};

}  // namespace

ModuleReaching reaching_map(const TypedDesign& td, int module_idx) {
  return CfgBuilder(td, module_idx).build();
}

}  // namespace vgen
