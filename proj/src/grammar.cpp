#include "vgen/grammar.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

namespace vgen {

namespace {

constexpr std::array<const char*, kNTCount> kNTNames = {
    "Source",        "DescriptionList", "Description",     "ModuleDecl",
    "PortListOpt",   "PortsOpt",        "PortList",        "PortListTail",
    "Port",          "Direction",       "PortType",        "NetOrVar",
    "SignedOpt",     "RangeOpt",        "Range",           "ConstExpr",
    "ConstExprTail", "ConstTerm",       "ItemList",        "Item",
    "NetDecl",       "VarDecl",         "VarKw",           "DeclrList",
    "DeclrListTail", "Declr",           "InitOpt",         "LocalparamDecl",
    "AssignItem",    "AlwaysItem",      "InitialItem",     "EventExpr",
    "EdgeItem",      "EdgeTail",        "GateInst",        "GateType",
    "ExpressionList","ExprListTail",    "InstOrStructDecl","InstOrStructTail",
    "ConnListOpt",   "ConnList",        "NamedConnList",   "NamedConnTail",
    "NamedConn",     "PosConnList",     "PosConnTail",     "Statement",
    "ProcAssign",    "AssignRest",      "IfStmt",          "ElseOpt",
    "CaseStmt",      "CaseItemList",    "CaseItemListTail","CaseItem",
    "SeqBlock",      "StatementList",   "LValue",          "LValueTail",
    "SelTail",       "FunctionDecl",    "FuncPortsOpt",    "FuncPortList",
    "FuncPortTail",  "FuncPort",        "TypedefDecl",     "MemberList",
    "MemberListTail","Member",          "Expression",      "Ternary",
    "TernaryTail",   "LorExpr",         "LorTail",         "LandExpr",
    "LandTail",      "BorExpr",         "BorTail",         "XorExpr",
    "XorTail",       "BandExpr",        "BandTail",        "EqExpr",
    "EqTail",        "RelExpr",         "RelTail",         "ShiftExpr",
    "ShiftTail",     "AddExpr",         "AddTail",         "MulExpr",
    "MulTail",       "UnaryExpr",       "Primary",         "PrimaryTail",
    "CallArgsOpt",   "Concat",          "ConcatTail",
};

}  // namespace

[[noreturn]] void grammar_bug(const char* what) {
  std::fprintf(stderr, "grammar construction bug: %s\n", what);
  std::abort();
}

const char* nt_name(NT nt) { return kNTNames[static_cast<int>(nt)]; }

bool nt_from_name(const std::string& name, NT& out) {
  static const std::unordered_map<std::string, NT> table = [] {
    std::unordered_map<std::string, NT> t;
    for (int i = 0; i < kNTCount; ++i) t.emplace(kNTNames[i], static_cast<NT>(i));
    return t;
  }();
  auto it = table.find(name);
  if (it == table.end()) return false;
  out = it->second;
  return true;
}

const Grammar& Grammar::get() {
  static const Grammar g;
  return g;
}

Grammar::Grammar() : version_("mini-verilog-1") {
  build_rules();
  compute_sets();
  build_table();
}

void Grammar::build_rules() {
  auto add = [this](NT lhs, std::vector<Sym> rhs) {
    rules_.push_back(Rule{static_cast<int>(rules_.size()), lhs, std::move(rhs)});
  };

  // Source structure
  add(NT::Source, {N(NT::DescriptionList)});
  add(NT::DescriptionList, {N(NT::Description), N(NT::DescriptionList)});
  add(NT::DescriptionList, {});
  add(NT::Description, {N(NT::ModuleDecl)});
  add(NT::Description, {N(NT::TypedefDecl)});
  add(NT::Description, {N(NT::LocalparamDecl)});

  // Modules and ports
  add(NT::ModuleDecl, {T(Tok::kw_module), T(Tok::identifier), N(NT::PortListOpt),
                       T(Tok::semicolon), N(NT::ItemList), T(Tok::kw_endmodule)});
  add(NT::PortListOpt, {T(Tok::lparen), N(NT::PortsOpt), T(Tok::rparen)});
  add(NT::PortListOpt, {});
  add(NT::PortsOpt, {N(NT::PortList)});
  add(NT::PortsOpt, {});
  add(NT::PortList, {N(NT::Port), N(NT::PortListTail)});
  add(NT::PortListTail, {T(Tok::comma), N(NT::Port), N(NT::PortListTail)});
  add(NT::PortListTail, {});
  add(NT::Port, {N(NT::Direction), N(NT::PortType), T(Tok::identifier)});
  add(NT::Direction, {T(Tok::kw_input)});
  add(NT::Direction, {T(Tok::kw_output)});
  add(NT::Direction, {T(Tok::kw_inout)});
  // The keyword-less alternative leaves the port's type open: family (and,
  // absent a range, width) are settled later by inference or defaults.
  add(NT::PortType, {N(NT::NetOrVar), N(NT::SignedOpt), N(NT::RangeOpt)});
  add(NT::PortType, {N(NT::SignedOpt), N(NT::RangeOpt)});
  add(NT::NetOrVar, {T(Tok::kw_wire)});
  add(NT::NetOrVar, {T(Tok::kw_reg)});
  add(NT::NetOrVar, {T(Tok::kw_logic)});
  add(NT::SignedOpt, {T(Tok::kw_signed)});
  add(NT::SignedOpt, {});
  add(NT::RangeOpt, {N(NT::Range)});
  add(NT::RangeOpt, {});
  add(NT::Range, {T(Tok::lbracket), N(NT::ConstExpr), T(Tok::colon), N(NT::ConstExpr),
                  T(Tok::rbracket)});

  // Constant expressions (ranges, localparam values): +/- over numbers and
  // parameter names, folded before type inference.
  add(NT::ConstExpr, {N(NT::ConstTerm), N(NT::ConstExprTail)});
  add(NT::ConstExprTail, {T(Tok::plus), N(NT::ConstTerm), N(NT::ConstExprTail)});
  add(NT::ConstExprTail, {T(Tok::minus), N(NT::ConstTerm), N(NT::ConstExprTail)});
  add(NT::ConstExprTail, {});
  add(NT::ConstTerm, {T(Tok::number)});
  add(NT::ConstTerm, {T(Tok::identifier)});

  // Module items
  add(NT::ItemList, {N(NT::Item), N(NT::ItemList)});
  add(NT::ItemList, {});
  add(NT::Item, {N(NT::NetDecl)});
  add(NT::Item, {N(NT::VarDecl)});
  add(NT::Item, {N(NT::LocalparamDecl)});
  add(NT::Item, {N(NT::AssignItem)});
  add(NT::Item, {N(NT::AlwaysItem)});
  add(NT::Item, {N(NT::InitialItem)});
  add(NT::Item, {N(NT::FunctionDecl)});
  add(NT::Item, {N(NT::GateInst)});
  add(NT::Item, {N(NT::InstOrStructDecl)});

  add(NT::NetDecl, {T(Tok::kw_wire), N(NT::SignedOpt), N(NT::RangeOpt), N(NT::DeclrList),
                    T(Tok::semicolon)});
  add(NT::VarDecl, {N(NT::VarKw), N(NT::SignedOpt), N(NT::RangeOpt), N(NT::DeclrList),
                    T(Tok::semicolon)});
  add(NT::VarKw, {T(Tok::kw_reg)});
  add(NT::VarKw, {T(Tok::kw_logic)});
  add(NT::DeclrList, {N(NT::Declr), N(NT::DeclrListTail)});
  add(NT::DeclrListTail, {T(Tok::comma), N(NT::Declr), N(NT::DeclrListTail)});
  add(NT::DeclrListTail, {});
  add(NT::Declr, {T(Tok::identifier), N(NT::InitOpt)});
  add(NT::InitOpt, {T(Tok::assign_eq), N(NT::Expression)});
  add(NT::InitOpt, {});
  add(NT::LocalparamDecl, {T(Tok::kw_localparam), N(NT::RangeOpt), T(Tok::identifier),
                           T(Tok::assign_eq), N(NT::ConstExpr), T(Tok::semicolon)});

  add(NT::AssignItem, {T(Tok::kw_assign), N(NT::LValue), T(Tok::assign_eq),
                       N(NT::Expression), T(Tok::semicolon)});
  add(NT::AlwaysItem, {T(Tok::kw_always), T(Tok::at), T(Tok::lparen), N(NT::EventExpr),
                       T(Tok::rparen), N(NT::Statement)});
  add(NT::InitialItem, {T(Tok::kw_initial), N(NT::Statement)});

  add(NT::EventExpr, {T(Tok::star)});
  add(NT::EventExpr, {N(NT::EdgeItem), N(NT::EdgeTail)});
  add(NT::EdgeItem, {T(Tok::kw_posedge), T(Tok::identifier)});
  add(NT::EdgeItem, {T(Tok::kw_negedge), T(Tok::identifier)});
  add(NT::EdgeItem, {T(Tok::identifier)});
  add(NT::EdgeTail, {T(Tok::kw_or), N(NT::EdgeItem), N(NT::EdgeTail)});
  add(NT::EdgeTail, {T(Tok::comma), N(NT::EdgeItem), N(NT::EdgeTail)});
  add(NT::EdgeTail, {});

  // Primitive gates: first terminal is the driven output, rest are inputs.
  add(NT::GateInst, {N(NT::GateType), T(Tok::identifier), T(Tok::lparen), N(NT::LValue),
                     T(Tok::comma), N(NT::ExpressionList), T(Tok::rparen), T(Tok::semicolon)});
  add(NT::GateType, {T(Tok::kw_and)});
  add(NT::GateType, {T(Tok::kw_or)});
  add(NT::GateType, {T(Tok::kw_xor)});
  add(NT::GateType, {T(Tok::kw_nand)});
  add(NT::GateType, {T(Tok::kw_nor)});
  add(NT::GateType, {T(Tok::kw_xnor)});
  add(NT::GateType, {T(Tok::kw_not)});
  add(NT::GateType, {T(Tok::kw_buf)});
  add(NT::ExpressionList, {N(NT::Expression), N(NT::ExprListTail)});
  add(NT::ExprListTail, {T(Tok::comma), N(NT::Expression), N(NT::ExprListTail)});
  add(NT::ExprListTail, {});

  // `name name (...)` instantiates a module; `name name ;` declares a
  // variable of a struct type.  The shared two-identifier prefix keeps the
  // table LL(1): the tail's first token decides.
  add(NT::InstOrStructDecl, {T(Tok::identifier), T(Tok::identifier), N(NT::InstOrStructTail)});
  add(NT::InstOrStructTail, {T(Tok::lparen), N(NT::ConnListOpt), T(Tok::rparen),
                             T(Tok::semicolon)});
  add(NT::InstOrStructTail, {T(Tok::semicolon)});
  add(NT::ConnListOpt, {N(NT::ConnList)});
  add(NT::ConnListOpt, {});
  add(NT::ConnList, {N(NT::NamedConnList)});
  add(NT::ConnList, {N(NT::PosConnList)});
  add(NT::NamedConnList, {N(NT::NamedConn), N(NT::NamedConnTail)});
  add(NT::NamedConnTail, {T(Tok::comma), N(NT::NamedConn), N(NT::NamedConnTail)});
  add(NT::NamedConnTail, {});
  add(NT::NamedConn, {T(Tok::dot), T(Tok::identifier), T(Tok::lparen), N(NT::Expression),
                      T(Tok::rparen)});
  add(NT::PosConnList, {N(NT::Expression), N(NT::PosConnTail)});
  add(NT::PosConnTail, {T(Tok::comma), N(NT::Expression), N(NT::PosConnTail)});
  add(NT::PosConnTail, {});

  // Statements
  add(NT::Statement, {N(NT::ProcAssign)});
  add(NT::Statement, {N(NT::IfStmt)});
  add(NT::Statement, {N(NT::CaseStmt)});
  add(NT::Statement, {N(NT::SeqBlock)});
  add(NT::ProcAssign, {N(NT::LValue), N(NT::AssignRest)});
  add(NT::AssignRest, {T(Tok::assign_eq), N(NT::Expression), T(Tok::semicolon)});
  add(NT::AssignRest, {T(Tok::le), N(NT::Expression), T(Tok::semicolon)});
  add(NT::IfStmt, {T(Tok::kw_if), T(Tok::lparen), N(NT::Expression), T(Tok::rparen),
                   N(NT::Statement), N(NT::ElseOpt)});
  add(NT::ElseOpt, {T(Tok::kw_else), N(NT::Statement)});
  add(NT::ElseOpt, {});
  add(NT::CaseStmt, {T(Tok::kw_case), T(Tok::lparen), N(NT::Expression), T(Tok::rparen),
                     N(NT::CaseItemList), T(Tok::kw_endcase)});
  add(NT::CaseItemList, {N(NT::CaseItem), N(NT::CaseItemListTail)});
  add(NT::CaseItemListTail, {N(NT::CaseItem), N(NT::CaseItemListTail)});
  add(NT::CaseItemListTail, {});
  add(NT::CaseItem, {N(NT::Expression), T(Tok::colon), N(NT::Statement)});
  add(NT::CaseItem, {T(Tok::kw_default), T(Tok::colon), N(NT::Statement)});
  add(NT::SeqBlock, {T(Tok::kw_begin), N(NT::StatementList), T(Tok::kw_end)});
  add(NT::StatementList, {N(NT::Statement), N(NT::StatementList)});
  add(NT::StatementList, {});

  add(NT::LValue, {T(Tok::identifier), N(NT::LValueTail)});
  add(NT::LValueTail, {T(Tok::dot), T(Tok::identifier)});
  add(NT::LValueTail, {T(Tok::lbracket), N(NT::Expression), N(NT::SelTail), T(Tok::rbracket)});
  add(NT::LValueTail, {});
  add(NT::SelTail, {T(Tok::colon), N(NT::Expression)});
  add(NT::SelTail, {});

  // Functions
  add(NT::FunctionDecl, {T(Tok::kw_function), N(NT::SignedOpt), N(NT::RangeOpt),
                         T(Tok::identifier), T(Tok::lparen), N(NT::FuncPortsOpt),
                         T(Tok::rparen), T(Tok::semicolon), N(NT::Statement),
                         T(Tok::kw_endfunction)});
  add(NT::FuncPortsOpt, {N(NT::FuncPortList)});
  add(NT::FuncPortsOpt, {});
  add(NT::FuncPortList, {N(NT::FuncPort), N(NT::FuncPortTail)});
  add(NT::FuncPortTail, {T(Tok::comma), N(NT::FuncPort), N(NT::FuncPortTail)});
  add(NT::FuncPortTail, {});
  add(NT::FuncPort, {T(Tok::kw_input), N(NT::PortType), T(Tok::identifier)});

  // Packed structs
  add(NT::TypedefDecl, {T(Tok::kw_typedef), T(Tok::kw_struct), T(Tok::kw_packed),
                        T(Tok::lbrace), N(NT::MemberList), T(Tok::rbrace),
                        T(Tok::identifier), T(Tok::semicolon)});
  add(NT::MemberList, {N(NT::Member), N(NT::MemberListTail)});
  add(NT::MemberListTail, {N(NT::Member), N(NT::MemberListTail)});
  add(NT::MemberListTail, {});
  add(NT::Member, {N(NT::NetOrVar), N(NT::SignedOpt), N(NT::RangeOpt), T(Tok::identifier),
                   T(Tok::semicolon)});

  // Expressions: the usual precedence ladder, tail-recursive for left
  // association.
  add(NT::Expression, {N(NT::Ternary)});
  add(NT::Ternary, {N(NT::LorExpr), N(NT::TernaryTail)});
  add(NT::TernaryTail, {T(Tok::question), N(NT::Expression), T(Tok::colon), N(NT::Ternary)});
  add(NT::TernaryTail, {});
  add(NT::LorExpr, {N(NT::LandExpr), N(NT::LorTail)});
  add(NT::LorTail, {T(Tok::pipe_pipe), N(NT::LandExpr), N(NT::LorTail)});
  add(NT::LorTail, {});
  add(NT::LandExpr, {N(NT::BorExpr), N(NT::LandTail)});
  add(NT::LandTail, {T(Tok::amp_amp), N(NT::BorExpr), N(NT::LandTail)});
  add(NT::LandTail, {});
  add(NT::BorExpr, {N(NT::XorExpr), N(NT::BorTail)});
  add(NT::BorTail, {T(Tok::pipe), N(NT::XorExpr), N(NT::BorTail)});
  add(NT::BorTail, {});
  add(NT::XorExpr, {N(NT::BandExpr), N(NT::XorTail)});
  add(NT::XorTail, {T(Tok::caret), N(NT::BandExpr), N(NT::XorTail)});
  add(NT::XorTail, {});
  add(NT::BandExpr, {N(NT::EqExpr), N(NT::BandTail)});
  add(NT::BandTail, {T(Tok::amp), N(NT::EqExpr), N(NT::BandTail)});
  add(NT::BandTail, {});
  add(NT::EqExpr, {N(NT::RelExpr), N(NT::EqTail)});
  add(NT::EqTail, {T(Tok::eq_eq), N(NT::RelExpr), N(NT::EqTail)});
  add(NT::EqTail, {T(Tok::bang_eq), N(NT::RelExpr), N(NT::EqTail)});
  add(NT::EqTail, {});
  add(NT::RelExpr, {N(NT::ShiftExpr), N(NT::RelTail)});
  add(NT::RelTail, {T(Tok::lt), N(NT::ShiftExpr), N(NT::RelTail)});
  add(NT::RelTail, {T(Tok::gt), N(NT::ShiftExpr), N(NT::RelTail)});
  add(NT::RelTail, {T(Tok::le), N(NT::ShiftExpr), N(NT::RelTail)});
  add(NT::RelTail, {T(Tok::ge), N(NT::ShiftExpr), N(NT::RelTail)});
  add(NT::RelTail, {});
  add(NT::ShiftExpr, {N(NT::AddExpr), N(NT::ShiftTail)});
  add(NT::ShiftTail, {T(Tok::shl), N(NT::AddExpr), N(NT::ShiftTail)});
  add(NT::ShiftTail, {T(Tok::shr), N(NT::AddExpr), N(NT::ShiftTail)});
  add(NT::ShiftTail, {});
  add(NT::AddExpr, {N(NT::MulExpr), N(NT::AddTail)});
  add(NT::AddTail, {T(Tok::plus), N(NT::MulExpr), N(NT::AddTail)});
  add(NT::AddTail, {T(Tok::minus), N(NT::MulExpr), N(NT::AddTail)});
  add(NT::AddTail, {});
  add(NT::MulExpr, {N(NT::UnaryExpr), N(NT::MulTail)});
  add(NT::MulTail, {T(Tok::star), N(NT::UnaryExpr), N(NT::MulTail)});
  add(NT::MulTail, {T(Tok::slash), N(NT::UnaryExpr), N(NT::MulTail)});
  add(NT::MulTail, {T(Tok::percent), N(NT::UnaryExpr), N(NT::MulTail)});
  add(NT::MulTail, {});
  add(NT::UnaryExpr, {T(Tok::bang), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {T(Tok::tilde), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {T(Tok::minus), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {T(Tok::amp), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {T(Tok::pipe), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {T(Tok::caret), N(NT::UnaryExpr)});
  add(NT::UnaryExpr, {N(NT::Primary)});
  add(NT::Primary, {T(Tok::identifier), N(NT::PrimaryTail)});
  add(NT::Primary, {T(Tok::number)});
  add(NT::Primary, {T(Tok::sized_number)});
  add(NT::Primary, {T(Tok::lparen), N(NT::Expression), T(Tok::rparen)});
  add(NT::Primary, {N(NT::Concat)});
  add(NT::PrimaryTail, {T(Tok::dot), T(Tok::identifier)});
  add(NT::PrimaryTail, {T(Tok::lbracket), N(NT::Expression), N(NT::SelTail), T(Tok::rbracket)});
  add(NT::PrimaryTail, {T(Tok::lparen), N(NT::CallArgsOpt), T(Tok::rparen)});
  add(NT::PrimaryTail, {});
  add(NT::CallArgsOpt, {N(NT::ExpressionList)});
  add(NT::CallArgsOpt, {});
  add(NT::Concat, {T(Tok::lbrace), N(NT::Expression), N(NT::ConcatTail), T(Tok::rbrace)});
  add(NT::ConcatTail, {T(Tok::comma), N(NT::Expression), N(NT::ConcatTail)});
  add(NT::ConcatTail, {});

  by_lhs_.assign(kNTCount, {});
  for (const Rule& r : rules_) by_lhs_[static_cast<int>(r.lhs)].push_back(r.id);
  for (int i = 0; i < kNTCount; ++i)
    if (by_lhs_[i].empty()) grammar_bug("nonterminal without productions");

  // Every nonterminal referenced on a right-hand side must be productive;
  // the loop above already guarantees it, but check terminals stay in range.
  for (const Rule& r : rules_)
    for (const Sym& s : r.rhs)
      if (s.terminal && s.id >= kTokCount) grammar_bug("terminal id out of range");
}

void Grammar::compute_sets() {
  const int eof = static_cast<int>(Tok::eof);
  nullable_.assign(kNTCount, false);
  first_.assign(kNTCount, std::vector<bool>(kTokCount, false));
  follow_.assign(kNTCount, std::vector<bool>(kTokCount, false));

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : rules_) {
      int lhs = static_cast<int>(r.lhs);
      bool all_nullable = true;
      for (const Sym& s : r.rhs) {
        if (s.terminal) {
          if (!first_[lhs][s.id]) {
            first_[lhs][s.id] = true;
            changed = true;
          }
          all_nullable = false;
          break;
        }
        for (int t = 0; t < kTokCount; ++t) {
          if (first_[s.id][t] && !first_[lhs][t]) {
            first_[lhs][t] = true;
            changed = true;
          }
        }
        if (!nullable_[s.id]) {
          all_nullable = false;
          break;
        }
      }
      if (all_nullable && !nullable_[lhs]) {
        nullable_[lhs] = true;
        changed = true;
      }
    }
  }

  follow_[static_cast<int>(start())][eof] = true;
  changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : rules_) {
      int lhs = static_cast<int>(r.lhs);
      for (size_t i = 0; i < r.rhs.size(); ++i) {
        if (r.rhs[i].terminal) continue;
        int a = r.rhs[i].id;
        bool tail_nullable = true;
        for (size_t j = i + 1; j < r.rhs.size() && tail_nullable; ++j) {
          const Sym& s = r.rhs[j];
          if (s.terminal) {
            if (!follow_[a][s.id]) {
              follow_[a][s.id] = true;
              changed = true;
            }
            tail_nullable = false;
          } else {
            for (int t = 0; t < kTokCount; ++t) {
              if (first_[s.id][t] && !follow_[a][t]) {
                follow_[a][t] = true;
                changed = true;
              }
            }
            tail_nullable = nullable_[s.id];
          }
        }
        if (tail_nullable) {
          for (int t = 0; t < kTokCount; ++t) {
            if (follow_[lhs][t] && !follow_[a][t]) {
              follow_[a][t] = true;
              changed = true;
            }
          }
        }
      }
    }
  }
}

void Grammar::build_table() {
  table_.assign(kNTCount, std::vector<int>(kTokCount, -1));

  // The one deliberate ambiguity: `else` binds to the nearest `if`.  The
  // table resolves (ElseOpt, kw_else) in favor of consuming the else.
  auto is_registered_conflict = [](NT nt, Tok t) {
    return nt == NT::ElseOpt && t == Tok::kw_else;
  };

  for (const Rule& r : rules_) {
    int lhs = static_cast<int>(r.lhs);
    // Terminals the rule can start with.
    std::vector<bool> sel(kTokCount, false);
    bool all_nullable = true;
    for (const Sym& s : r.rhs) {
      if (s.terminal) {
        sel[s.id] = true;
        all_nullable = false;
        break;
      }
      for (int t = 0; t < kTokCount; ++t) sel[t] = sel[t] || first_[s.id][t];
      if (!nullable_[s.id]) {
        all_nullable = false;
        break;
      }
    }
    if (all_nullable)
      for (int t = 0; t < kTokCount; ++t) sel[t] = sel[t] || follow_[lhs][t];

    for (int t = 0; t < kTokCount; ++t) {
      if (!sel[t]) continue;
      int& cell = table_[lhs][t];
      if (cell == -1) {
        cell = r.id;
        continue;
      }
      if (!is_registered_conflict(r.lhs, static_cast<Tok>(t)))
        grammar_bug("predictive table conflict outside the dangling-else cell");
      // Prefer the rule that consumes the else (the non-epsilon one).
      if (!r.rhs.empty()) cell = r.id;
    }
  }
}

std::vector<Tok> Grammar::expected_tokens(NT nt) const {
  std::vector<Tok> out;
  for (int t = 0; t < kTokCount; ++t)
    if (table_[static_cast<int>(nt)][t] != -1) out.push_back(static_cast<Tok>(t));
  return out;
}

}  // namespace vgen
