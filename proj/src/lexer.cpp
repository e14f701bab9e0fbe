#include "vgen/token.hpp"

#include <array>
#include <cctype>
#include <cstring>
#include <unordered_map>

namespace vgen {

namespace {

struct TokInfo {
  const char* name;
  const char* spelling;
};

constexpr std::array<TokInfo, kTokCount> kTokInfo = {{
    {"eof", ""},
    {"identifier", ""},
    {"number", ""},
    {"sized_number", ""},
    {"kw_module", "module"},
    {"kw_endmodule", "endmodule"},
    {"kw_input", "input"},
    {"kw_output", "output"},
    {"kw_inout", "inout"},
    {"kw_wire", "wire"},
    {"kw_reg", "reg"},
    {"kw_logic", "logic"},
    {"kw_signed", "signed"},
    {"kw_assign", "assign"},
    {"kw_always", "always"},
    {"kw_initial", "initial"},
    {"kw_begin", "begin"},
    {"kw_end", "end"},
    {"kw_if", "if"},
    {"kw_else", "else"},
    {"kw_case", "case"},
    {"kw_endcase", "endcase"},
    {"kw_default", "default"},
    {"kw_posedge", "posedge"},
    {"kw_negedge", "negedge"},
    {"kw_function", "function"},
    {"kw_endfunction", "endfunction"},
    {"kw_localparam", "localparam"},
    {"kw_typedef", "typedef"},
    {"kw_struct", "struct"},
    {"kw_packed", "packed"},
    {"kw_and", "and"},
    {"kw_or", "or"},
    {"kw_xor", "xor"},
    {"kw_nand", "nand"},
    {"kw_nor", "nor"},
    {"kw_xnor", "xnor"},
    {"kw_not", "not"},
    {"kw_buf", "buf"},
    {"lparen", "("},
    {"rparen", ")"},
    {"lbracket", "["},
    {"rbracket", "]"},
    {"lbrace", "{"},
    {"rbrace", "}"},
    {"semicolon", ";"},
    {"colon", ":"},
    {"comma", ","},
    {"dot", "."},
    {"at", "@"},
    {"question", "?"},
    {"assign_eq", "="},
    {"plus", "+"},
    {"minus", "-"},
    {"star", "*"},
    {"slash", "/"},
    {"percent", "%"},
    {"amp", "&"},
    {"pipe", "|"},
    {"caret", "^"},
    {"tilde", "~"},
    {"bang", "!"},
    {"amp_amp", "&&"},
    {"pipe_pipe", "||"},
    {"eq_eq", "=="},
    {"bang_eq", "!="},
    {"lt", "<"},
    {"gt", ">"},
    {"le", "<="},
    {"ge", ">="},
    {"shl", "<<"},
    {"shr", ">>"},
}};

const std::unordered_map<std::string, Tok>& keyword_table() {
  static const std::unordered_map<std::string, Tok> table = [] {
    std::unordered_map<std::string, Tok> t;
    for (int i = static_cast<int>(Tok::kw_module); i <= static_cast<int>(Tok::kw_buf); ++i) {
      t.emplace(kTokInfo[i].spelling, static_cast<Tok>(i));
    }
    return t;
  }();
  return table;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_base_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

const char* tok_name(Tok t) { return kTokInfo[static_cast<int>(t)].name; }
const char* tok_spelling(Tok t) { return kTokInfo[static_cast<int>(t)].spelling; }

Result<std::vector<Token>, LexError> tokenize(const std::string& text) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = text.size();
  int line = 1;
  int col = 1;
  bool at_line_start = true;  // only blanks seen since the last newline

  auto advance = [&](size_t count) {
    for (size_t k = 0; k < count && i < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
        at_line_start = true;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](std::string msg) {
    return Result<std::vector<Token>, LexError>(LexError{std::move(msg), line, col});
  };

  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '`') {
      if (!at_line_start) return error("stray backtick; directives must start their line");
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      int start_line = line, start_col = col;
      advance(2);
      while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) advance(1);
      if (i + 1 >= n) {
        line = start_line;
        col = start_col;
        return error("unterminated block comment");
      }
      advance(2);
      continue;
    }

    at_line_start = false;
    Token tok;
    tok.line = line;
    tok.col = col;

    if (is_ident_start(c)) {
      size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      tok.lexeme = text.substr(i, j - i);
      auto it = keyword_table().find(tok.lexeme);
      tok.kind = it == keyword_table().end() ? Tok::identifier : it->second;
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }

    if (is_digit(c)) {
      size_t j = i;
      while (j < n && (is_digit(text[j]) || text[j] == '_')) ++j;
      // A size prefix followed by 'b/'o/'d/'h makes a based literal.
      if (j < n && text[j] == '\'') {
        size_t k = j + 1;
        if (k >= n || std::strchr("bBoOdDhH", text[k]) == nullptr)
          return error("expected base letter after ' in sized literal");
        ++k;
        size_t digits = k;
        while (k < n && is_base_digit(text[k])) ++k;
        if (k == digits) return error("sized literal has no digits");
        tok.kind = Tok::sized_number;
        tok.lexeme = text.substr(i, k - i);
        advance(k - i);
      } else {
        tok.kind = Tok::number;
        tok.lexeme = text.substr(i, j - i);
        advance(j - i);
      }
      out.push_back(std::move(tok));
      continue;
    }

    auto two = [&](char a, char b) {
      return c == a && i + 1 < n && text[i + 1] == b;
    };
    Tok kind;
    int len = 2;
    if (two('&', '&')) kind = Tok::amp_amp;
    else if (two('|', '|')) kind = Tok::pipe_pipe;
    else if (two('=', '=')) kind = Tok::eq_eq;
    else if (two('!', '=')) kind = Tok::bang_eq;
    else if (two('<', '=')) kind = Tok::le;
    else if (two('>', '=')) kind = Tok::ge;
    else if (two('<', '<')) kind = Tok::shl;
    else if (two('>', '>')) kind = Tok::shr;
    else {
      len = 1;
      switch (c) {
        case '(': kind = Tok::lparen; break;
        case ')': kind = Tok::rparen; break;
        case '[': kind = Tok::lbracket; break;
        case ']': kind = Tok::rbracket; break;
        case '{': kind = Tok::lbrace; break;
        case '}': kind = Tok::rbrace; break;
        case ';': kind = Tok::semicolon; break;
        case ':': kind = Tok::colon; break;
        case ',': kind = Tok::comma; break;
        case '.': kind = Tok::dot; break;
        case '@': kind = Tok::at; break;
        case '?': kind = Tok::question; break;
        case '=': kind = Tok::assign_eq; break;
        case '+': kind = Tok::plus; break;
        case '-': kind = Tok::minus; break;
        case '*': kind = Tok::star; break;
        case '/': kind = Tok::slash; break;
        case '%': kind = Tok::percent; break;
        case '&': kind = Tok::amp; break;
        case '|': kind = Tok::pipe; break;
        case '^': kind = Tok::caret; break;
        case '~': kind = Tok::tilde; break;
        case '!': kind = Tok::bang; break;
        case '<': kind = Tok::lt; break;
        case '>': kind = Tok::gt; break;
        default:
          return error(std::string("illegal character '") + c + "'");
      }
    }
    tok.kind = kind;
    tok.lexeme = tok_spelling(kind);
    advance(len);
    out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace vgen
