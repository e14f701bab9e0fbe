#include "vgen/parser.hpp"

#include "vgen/grammar.hpp"

namespace vgen {

namespace {

SyntaxError err_at(const Token& tok, std::string message, std::vector<Tok> expected = {}) {
  SyntaxError e;
  e.message = std::move(message);
  e.line = tok.line;
  e.col = tok.col;
  e.expected = std::move(expected);
  return e;
}

std::string describe(const Token& tok) {
  if (tok.kind == Tok::eof) return "end of input";
  return "'" + tok.lexeme + "'";
}

}  // namespace

Result<Tree, SyntaxError> parse_tokens(const std::vector<Token>& toks) {
  const Grammar& g = Grammar::get();
  Tree tree;

  Token eof_tok;
  eof_tok.kind = Tok::eof;
  if (!toks.empty()) {
    eof_tok.line = toks.back().line;
    eof_tok.col = toks.back().col + static_cast<int>(toks.back().lexeme.size());
  } else {
    eof_tok.line = 1;
    eof_tok.col = 1;
  }
  auto lookahead = [&](size_t pos) -> const Token& {
    return pos < toks.size() ? toks[pos] : eof_tok;
  };

  // Work stack of tree slots to fill.  A slot is (grammar symbol, node to
  // write).  Nonterminal slots pre-allocate their node so parents can link
  // children before expansion.
  struct Slot {
    Sym sym;
    int node;
  };
  int root = tree.add_node(/*rule placeholder*/ 0);
  tree.root = root;
  std::vector<Slot> stack;
  stack.push_back({N(g.start()), root});
  // The pre-allocated root gets its real rule on expansion; mark invalid.
  tree.at(root).rule = -2;

  size_t pos = 0;
  while (!stack.empty()) {
    Slot slot = stack.back();
    stack.pop_back();
    const Token& la = lookahead(pos);

    if (slot.sym.terminal) {
      if (la.kind != slot.sym.tok()) {
        return err_at(la,
                      std::string("expected '") + tok_spelling(slot.sym.tok()) +
                          "' before " + describe(la),
                      {slot.sym.tok()});
      }
      tree.at(slot.node).tok = la;
      tree.at(slot.node).rule = -1;
      ++pos;
      continue;
    }

    NT nt = slot.sym.nt();
    int rule_id = g.predict(nt, la.kind);
    if (rule_id < 0) {
      return err_at(la, "unexpected " + describe(la) + " while parsing " + nt_name(nt),
                    g.expected_tokens(nt));
    }
    const Rule& rule = g.rule(rule_id);
    Node& n = tree.at(slot.node);
    n.rule = rule_id;
    n.kids.clear();
    n.kids.reserve(rule.rhs.size());
    std::vector<int> kid_ids;
    kid_ids.reserve(rule.rhs.size());
    for (size_t i = 0; i < rule.rhs.size(); ++i) kid_ids.push_back(tree.add_node(-2));
    // add_node may reallocate; re-fetch the node before linking.
    Node& n2 = tree.at(slot.node);
    for (int id : kid_ids) n2.kids.push_back(id);
    for (size_t i = rule.rhs.size(); i-- > 0;)
      stack.push_back({rule.rhs[i], kid_ids[i]});
  }

  if (pos != toks.size()) {
    const Token& extra = lookahead(pos);
    return err_at(extra, "extra input after design: " + describe(extra));
  }
  return tree;
}

Result<Tree, SyntaxError> parse_design(const std::string& text) {
  auto toks = tokenize(text);
  if (!toks.ok()) {
    SyntaxError e;
    e.message = toks.error().message;
    e.line = toks.error().line;
    e.col = toks.error().col;
    return e;
  }
  return parse_tokens(toks.value());
}

}  // namespace vgen
