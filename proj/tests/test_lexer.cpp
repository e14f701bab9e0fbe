#include <doctest.h>

#include <string>
#include <vector>

#include "vgen/lexer.hpp"

using namespace vgen;

namespace {

std::vector<Tok> kinds_of(const std::string& text) {
  auto r = tokenize(text);
  REQUIRE(r.ok());
  std::vector<Tok> out;
  for (const auto& t : r.value()) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("empty input lexes to an empty stream") {
  auto r = tokenize("");
  REQUIRE(r.ok());
  CHECK(r.value().empty());
}

TEST_CASE("keywords, identifiers and punctuation") {
  auto ks = kinds_of("module top ( input clk ) ; endmodule");
  std::vector<Tok> want = {Tok::kw_module, Tok::identifier, Tok::lparen, Tok::kw_input,
                           Tok::identifier, Tok::rparen,    Tok::semicolon,
                           Tok::kw_endmodule};
  CHECK(ks == want);
}

TEST_CASE("identifiers that merely contain keyword prefixes stay identifiers") {
  auto ks = kinds_of("wirey modulex regs input_");
  CHECK(ks == std::vector<Tok>{Tok::identifier, Tok::identifier, Tok::identifier,
                               Tok::identifier});
}

TEST_CASE("numbers split into sized and unsized kinds") {
  auto r = tokenize("42 8'hF0 4'b1010 16'd255");
  REQUIRE(r.ok());
  const auto& ts = r.value();
  REQUIRE(ts.size() == 4);
  CHECK(ts[0].kind == Tok::number);
  CHECK(ts[0].lexeme == "42");
  CHECK(ts[1].kind == Tok::sized_number);
  CHECK(ts[1].lexeme == "8'hF0");
  CHECK(ts[2].kind == Tok::sized_number);
  CHECK(ts[3].kind == Tok::sized_number);
}

TEST_CASE("two-character operators win over their prefixes") {
  auto ks = kinds_of("<= < = == = != ! && & || | << >> >=");
  std::vector<Tok> want = {Tok::le,        Tok::lt,    Tok::assign_eq, Tok::eq_eq,
                           Tok::assign_eq, Tok::bang_eq, Tok::bang,    Tok::amp_amp,
                           Tok::amp,       Tok::pipe_pipe, Tok::pipe,  Tok::shl,
                           Tok::shr,       Tok::ge};
  CHECK(ks == want);
}

TEST_CASE("line and column positions are 1-based and track newlines") {
  auto r = tokenize("wire a ;\n  reg b ;\n");
  REQUIRE(r.ok());
  const auto& ts = r.value();
  REQUIRE(ts.size() == 6);
  CHECK(ts[0].line == 1);
  CHECK(ts[0].col == 1);
  CHECK(ts[1].line == 1);
  CHECK(ts[1].col == 6);
  CHECK(ts[3].line == 2);
  CHECK(ts[3].col == 3);  // "reg" after two spaces
  CHECK(ts[4].line == 2);
  CHECK(ts[4].col == 7);
}

TEST_CASE("line comments, block comments and whitespace are skipped") {
  auto ks = kinds_of("wire // trailing comment\n/* block\nspanning lines */ w ;");
  CHECK(ks == std::vector<Tok>{Tok::kw_wire, Tok::identifier, Tok::semicolon});
}

TEST_CASE("a directive line starting with a backtick is skipped whole") {
  auto ks = kinds_of("`timescale 1ns / 1ps\nwire w ;\n");
  CHECK(ks == std::vector<Tok>{Tok::kw_wire, Tok::identifier, Tok::semicolon});
}

TEST_CASE("a backtick in the middle of a line is an error with a position") {
  auto r = tokenize("wire `oops ;");
  REQUIRE(!r.ok());
  CHECK(r.error().line == 1);
  CHECK(r.error().col == 6);
  CHECK(!r.error().message.empty());
}

TEST_CASE("an unsupported character reports line and column") {
  auto r = tokenize("wire a ;\nassign a = $time ;\n");
  REQUIRE(!r.ok());
  CHECK(r.error().line == 2);
  CHECK(r.error().col == 12);
}

TEST_CASE("an unterminated block comment is an error") {
  auto r = tokenize("wire w ; /* never closed");
  CHECK(!r.ok());
}

TEST_CASE("token spellings round-trip through the lexer") {
  for (int i = 0; i < kTokCount; ++i) {
    Tok k = static_cast<Tok>(i);
    std::string sp = tok_spelling(k);
    if (sp.empty()) continue;  // identifier-like kinds have no fixed spelling
    CAPTURE(tok_name(k));
    auto r = tokenize(sp);
    REQUIRE(r.ok());
    REQUIRE(r.value().size() == 1);
    CHECK(r.value()[0].kind == k);
    CHECK(r.value()[0].lexeme == sp);
  }
}

TEST_CASE("tok_name is unique across all kinds") {
  std::vector<std::string> seen;
  for (int i = 0; i < kTokCount; ++i) {
    std::string n = tok_name(static_cast<Tok>(i));
    CHECK(!n.empty());
    for (const auto& p : seen) CHECK(p != n);
    seen.push_back(n);
  }
}
