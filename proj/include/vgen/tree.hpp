#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/grammar.hpp"
#include "vgen/token.hpp"

namespace vgen {

// Derivation tree over the mini-Verilog grammar.  Internal nodes carry the
// production that expanded them; leaves carry tokens.  This one structure is
// the pipeline currency: the parser builds it, training counts its rules,
// the generator samples it, and the later phases rewrite identifier lexemes
// and type slots in place.
//
// Nodes live in an arena indexed by int; edits may strand old nodes, which
// is fine -- reachability from root defines the tree.
struct Node {
  int rule = -1;                 // production id; -1 for leaves
  Token tok;                     // leaves only
  std::vector<int32_t> kids;     // internal nodes only
  bool placeholder = false;      // leaf: unsubstituted identifier slot
  int32_t ph_ord = -1;           // placeholder ordinal (identifier or type slot)
};

class Tree {
public:
  int root = -1;

  Node& at(int i) { return nodes_[i]; }
  const Node& at(int i) const { return nodes_[i]; }
  int size() const { return static_cast<int>(nodes_.size()); }

  int add_leaf(Token tok) {
    Node n;
    n.tok = std::move(tok);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Adds an internal node for `rule` with no children yet.
  int add_node(int rule) {
    Node n;
    n.rule = rule;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool is_leaf(int i) const { return nodes_[i].rule < 0; }
  NT lhs_of(int i) const { return Grammar::get().rule(nodes_[i].rule).lhs; }

  // In-order leaf sequence (the design's token stream).
  std::vector<int> leaves() const;
  int leaf_count() const;

private:
  std::vector<Node> nodes_;
};

// Serializes the leaf tokens to source text: single spaces between tokens,
// no space before ';' and ',', newlines after statement-ish terminators.
// The output re-lexes to exactly the tree's leaf sequence.
std::string print_tree(const Tree& t);

// Like print_tree but marks open type slots with /* TYPE_<n> */ comments so
// skeleton dumps show where inference will act.  Comments lex away, so the
// output still re-parses.
std::string print_tree_annotated(const Tree& t);

// Structural equality of the trees reachable from the roots (rules, token
// kinds, lexemes; arena layout and source positions ignored).
bool tree_equal(const Tree& a, const Tree& b);

// --- construction helpers used by generation and injection ----------------
// Each builds a grammar-conformant subtree and returns its root node id.
// They assert (in debug builds) that children match the named rule's rhs.

class TreeBuilder {
public:
  explicit TreeBuilder(Tree& t) : t_(t) {}

  int leaf(Tok kind, std::string lexeme);
  int leaf(Tok kind) { return leaf(kind, tok_spelling(kind)); }
  // node(rule, children): children must line up with the rule's rhs.
  int node(int rule, std::vector<int> kids);

  // Convenience composites for the shapes injection synthesizes.
  int identifier(const std::string& name) { return leaf(Tok::identifier, name); }
  int number(uint64_t v) { return leaf(Tok::number, std::to_string(v)); }

  // Expression wrapping: lifts a Primary-level node through the precedence
  // chain up to Expression.
  int wrap_primary_to_expression(int primary_node);
  // A bare-identifier expression (Primary -> identifier with empty tail).
  int ident_expression(const std::string& name);
  // identifier . member as an expression.
  int hier_expression(const std::string& base, const std::string& member);
  // Bare-identifier LValue, or instance.member LValue.
  int lvalue(const std::string& name);
  int hier_lvalue(const std::string& base, const std::string& member);

private:
  Tree& t_;
};

// Finds the rule id with the given lhs whose rhs matches exactly; aborts if
// absent (grammar drift guard for the builders).
int find_rule(NT lhs, const std::vector<Sym>& rhs);

}  // namespace vgen
