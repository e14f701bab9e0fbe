#pragma once

#include <string>
#include <vector>

#include "vgen/result.hpp"
#include "vgen/token.hpp"
#include "vgen/tree.hpp"

namespace vgen {

struct SyntaxError {
  std::string message;
  int line = 0;
  int col = 0;
  std::vector<Tok> expected;  // token kinds that would have been accepted
};

// Predictive parse of a token stream into a derivation tree covering every
// token.  The grammar's parse table drives the expansion, so the rules the
// parser activates are exactly the rules recorded in the tree -- the
// property training depends on.
Result<Tree, SyntaxError> parse_tokens(const std::vector<Token>& toks);

// Lex + parse.  Lexical errors surface as SyntaxError with an empty
// expected set.
Result<Tree, SyntaxError> parse_design(const std::string& text);

}  // namespace vgen
