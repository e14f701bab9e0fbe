#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/result.hpp"

namespace vgen {

// Token kinds double as the alphabet for n-gram diversity measurements:
// keywords keep their identity, identifiers collapse into one kind, and
// numeric literals split only into sized/unsized.  Keep the order stable --
// kind values end up in serialized diagnostics and test expectations.
enum class Tok : uint8_t {
  eof,
  identifier,
  number,        // unsized decimal literal: 42
  sized_number,  // based literal with a size prefix: 8'hFF, 4'b1010

  kw_module,
  kw_endmodule,
  kw_input,
  kw_output,
  kw_inout,
  kw_wire,
  kw_reg,
  kw_logic,
  kw_signed,
  kw_assign,
  kw_always,
  kw_initial,
  kw_begin,
  kw_end,
  kw_if,
  kw_else,
  kw_case,
  kw_endcase,
  kw_default,
  kw_posedge,
  kw_negedge,
  kw_function,
  kw_endfunction,
  kw_localparam,
  kw_typedef,
  kw_struct,
  kw_packed,
  kw_and,
  kw_or,
  kw_xor,
  kw_nand,
  kw_nor,
  kw_xnor,
  kw_not,
  kw_buf,

  lparen,
  rparen,
  lbracket,
  rbracket,
  lbrace,
  rbrace,
  semicolon,
  colon,
  comma,
  dot,
  at,
  question,
  assign_eq,  // =
  plus,
  minus,
  star,
  slash,
  percent,
  amp,
  pipe,
  caret,
  tilde,
  bang,
  amp_amp,
  pipe_pipe,
  eq_eq,
  bang_eq,
  lt,
  gt,
  le,
  ge,
  shl,
  shr,
};

constexpr int kTokCount = static_cast<int>(Tok::shr) + 1;

// Human-readable name, e.g. "kw_module" or "semicolon".
const char* tok_name(Tok t);

// Canonical source spelling for fixed tokens ("module", "<=", ...).
// Identifier/number kinds have no fixed spelling and return "".
const char* tok_spelling(Tok t);

struct Token {
  Tok kind = Tok::eof;
  std::string lexeme;
  int line = 0;  // 1-based
  int col = 0;   // 1-based
};

struct LexError {
  std::string message;
  int line = 0;
  int col = 0;
};

// Lexes UTF-8 text into tokens.  Comments (// and /* */) and whitespace are
// skipped.  A line whose first non-blank character is a backtick (compiler
// directives such as `timescale) is skipped whole; a backtick anywhere else
// is an error.  The returned sequence does not include an eof token.
Result<std::vector<Token>, LexError> tokenize(const std::string& text);

}  // namespace vgen
