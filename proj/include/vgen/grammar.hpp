#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/token.hpp"

namespace vgen {

// Nonterminals of the mini-Verilog grammar.  Order is part of the grammar
// version: rule ids and serialized tables depend on it.
enum class NT : uint8_t {
  Source,
  DescriptionList,
  Description,
  ModuleDecl,
  PortListOpt,
  PortsOpt,
  PortList,
  PortListTail,
  Port,
  Direction,
  PortType,
  NetOrVar,
  SignedOpt,
  RangeOpt,
  Range,
  ConstExpr,
  ConstExprTail,
  ConstTerm,
  ItemList,
  Item,
  NetDecl,
  VarDecl,
  VarKw,
  DeclrList,
  DeclrListTail,
  Declr,
  InitOpt,
  LocalparamDecl,
  AssignItem,
  AlwaysItem,
  InitialItem,
  EventExpr,
  EdgeItem,
  EdgeTail,
  GateInst,
  GateType,
  ExpressionList,
  ExprListTail,
  InstOrStructDecl,
  InstOrStructTail,
  ConnListOpt,
  ConnList,
  NamedConnList,
  NamedConnTail,
  NamedConn,
  PosConnList,
  PosConnTail,
  Statement,
  ProcAssign,
  AssignRest,
  IfStmt,
  ElseOpt,
  CaseStmt,
  CaseItemList,
  CaseItemListTail,
  CaseItem,
  SeqBlock,
  StatementList,
  LValue,
  LValueTail,
  SelTail,
  FunctionDecl,
  FuncPortsOpt,
  FuncPortList,
  FuncPortTail,
  FuncPort,
  TypedefDecl,
  MemberList,
  MemberListTail,
  Member,
  Expression,
  Ternary,
  TernaryTail,
  LorExpr,
  LorTail,
  LandExpr,
  LandTail,
  BorExpr,
  BorTail,
  XorExpr,
  XorTail,
  BandExpr,
  BandTail,
  EqExpr,
  EqTail,
  RelExpr,
  RelTail,
  ShiftExpr,
  ShiftTail,
  AddExpr,
  AddTail,
  MulExpr,
  MulTail,
  UnaryExpr,
  Primary,
  PrimaryTail,
  CallArgsOpt,
  Concat,
  ConcatTail,
};

constexpr int kNTCount = static_cast<int>(NT::ConcatTail) + 1;

const char* nt_name(NT nt);
// Reverse of nt_name; returns false if the name is unknown.
bool nt_from_name(const std::string& name, NT& out);

// Aborts: an invariant of the fixed grammar was violated (a walker asked
// for a production shape that does not exist).  Only reachable through a
// programming error, never through user input.
[[noreturn]] void grammar_bug(const char* what);

// A grammar symbol: either a terminal token kind or a nonterminal.
struct Sym {
  bool terminal;
  uint8_t id;  // Tok when terminal, NT otherwise

  Tok tok() const { return static_cast<Tok>(id); }
  NT nt() const { return static_cast<NT>(id); }
  bool operator==(const Sym&) const = default;
};

inline Sym T(Tok t) { return Sym{true, static_cast<uint8_t>(t)}; }
inline Sym N(NT n) { return Sym{false, static_cast<uint8_t>(n)}; }

struct Rule {
  int id;  // dense, stable for a fixed grammar version
  NT lhs;
  std::vector<Sym> rhs;  // empty = epsilon
};

// The fixed mini-Verilog grammar plus the predictive parse table derived
// from it.  Built once; immutable afterwards.
class Grammar {
public:
  static const Grammar& get();

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(int id) const { return rules_[id]; }
  int rule_count() const { return static_cast<int>(rules_.size()); }
  NT start() const { return NT::Source; }

  // Version tag recorded in serialized probability tables; bumped whenever
  // the production list changes shape or order.
  const std::string& version() const { return version_; }

  const std::vector<int>& rules_for(NT nt) const {
    return by_lhs_[static_cast<int>(nt)];
  }

  // Predictive table: rule id to expand `nt` by when the lookahead is `t`,
  // or -1 when no rule applies (syntax error).
  int predict(NT nt, Tok t) const {
    return table_[static_cast<int>(nt)][static_cast<int>(t)];
  }

  bool nullable(NT nt) const { return nullable_[static_cast<int>(nt)]; }
  const std::vector<bool>& first(NT nt) const { return first_[static_cast<int>(nt)]; }
  const std::vector<bool>& follow(NT nt) const { return follow_[static_cast<int>(nt)]; }

  // Terminals that can legally start `nt` in its current context; used for
  // syntax-error messages.
  std::vector<Tok> expected_tokens(NT nt) const;

private:
  Grammar();
  void build_rules();
  void compute_sets();
  void build_table();

  std::string version_;
  std::vector<Rule> rules_;
  std::vector<std::vector<int>> by_lhs_;
  std::vector<bool> nullable_;
  std::vector<std::vector<bool>> first_;
  std::vector<std::vector<bool>> follow_;
  std::vector<std::vector<int>> table_;
};

}  // namespace vgen
