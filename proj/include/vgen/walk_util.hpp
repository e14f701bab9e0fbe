#pragma once

// Small tree-shape helpers shared by the phases that traverse derivation
// trees structurally (typing, dataflow, injection).

#include "vgen/grammar.hpp"
#include "vgen/tree.hpp"

namespace vgen {

inline int wkid(const Tree& t, int node, int i) { return t.at(node).kids[i]; }

// Index of a node's production among its nonterminal's alternatives.
inline int walt(const Tree& t, int node) {
  const Node& n = t.at(node);
  const auto& ids = Grammar::get().rules_for(Grammar::get().rule(n.rule).lhs);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == n.rule) return static_cast<int>(i);
  }
  grammar_bug("rule not among its lhs alternatives");
  return -1;
}

inline NT wlhs(const Tree& t, int node) { return t.lhs_of(node); }

inline const std::string& wlex(const Tree& t, int leaf) { return t.at(leaf).tok.lexeme; }

inline int wfirst_leaf(const Tree& t, int node) {
  int cur = node;
  while (!t.is_leaf(cur)) {
    if (t.at(cur).kids.empty()) return -1;
    cur = t.at(cur).kids[0];
  }
  return cur;
}

inline void wpos(const Tree& t, int node, int* line, int* col) {
  int leaf = wfirst_leaf(t, node);
  *line = leaf < 0 ? 0 : t.at(leaf).tok.line;
  *col = leaf < 0 ? 0 : t.at(leaf).tok.col;
}

// The identifier leaf of an expression that is exactly one bare identifier,
// else -1.
inline int wbare_id_leaf(const Tree& t, int expr_node) {
  int n = wkid(t, expr_node, 0);           // Ternary
  if (walt(t, wkid(t, n, 1)) == 0) return -1;
  n = wkid(t, n, 0);                       // LorExpr
  for (int level = 0; level < 10; ++level) {
    int tail = wkid(t, n, 1);
    int empty_alt = static_cast<int>(Grammar::get().rules_for(wlhs(t, tail)).size()) - 1;
    if (walt(t, tail) != empty_alt) return -1;
    n = wkid(t, n, 0);
  }
  if (walt(t, n) != 6) return -1;          // UnaryExpr must be the Primary form
  n = wkid(t, n, 0);                       // Primary
  if (walt(t, n) != 0) return -1;
  if (walt(t, wkid(t, n, 1)) != 3) return -1;  // PrimaryTail must be empty
  return wkid(t, n, 0);
}

}  // namespace vgen
