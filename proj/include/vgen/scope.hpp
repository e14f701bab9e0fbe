#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgen/result.hpp"
#include "vgen/rng.hpp"
#include "vgen/tree.hpp"

namespace vgen {

enum class SymKind : uint8_t {
  Net,        // wire-declared
  Var,        // reg/logic-declared
  Port,       // keyword-less port: family open until type inference
  Param,      // localparam
  Function,
  Module,
  StructType,
  Instance,  // module instantiation or struct-typed variable
};

enum class Direction : uint8_t { In, Out, Inout, None };

// What the declaring syntax says about a symbol's net/var family.  Ports
// without a keyword stay open and inference settles them; everything else
// is pinned by its declaration.
enum class FamilyHint : uint8_t { Open, NetH, VarH };

const char* sym_kind_name(SymKind k);

struct Symbol {
  std::string name;
  SymKind kind = SymKind::Net;
  Direction dir = Direction::None;
  FamilyHint fam = FamilyHint::Open;
  int decl_node = -1;       // tree node of the declaring construct
  int decl_order = 0;       // item index within the module (-1 for ports)
  std::string instance_of;  // Instance: module or struct-type name (gates: empty)
  bool struct_instance = false;
  int fn_arity = 0;  // Function only
};

struct StructMember {
  std::string name;
  int width = 1;
  bool is_signed = false;
};

struct StructInfo {
  std::string name;
  std::vector<StructMember> members;
  int total_width() const {
    int w = 0;
    for (const auto& m : members) w += m.width;
    return w;
  }
};

struct ModuleInfo {
  std::string name;
  int node = -1;  // ModuleDecl tree node
  std::vector<Symbol> symbols;  // declaration order
  std::map<std::string, int> by_name;
  std::vector<int> ports;      // indices into symbols, port order
  std::map<std::string, int64_t> params;  // folded localparam values (incl. file-level)

  const Symbol* find(const std::string& name) const {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : &symbols[it->second];
  }
};

// A design whose identifiers are all concrete names and whose per-module
// symbol tables are retained for typing, dataflow, and injection.
struct NamedDesign {
  Tree tree;
  std::vector<ModuleInfo> modules;
  std::map<std::string, int> module_by_name;
  std::vector<StructInfo> structs;
  std::map<std::string, int> struct_by_name;
  std::map<std::string, int64_t> file_params;
  int next_id = 0;  // next ordinal for minted id_<n> names

  const ModuleInfo* find_module(const std::string& name) const {
    auto it = module_by_name.find(name);
    return it == module_by_name.end() ? nullptr : &modules[it->second];
  }
  const StructInfo* find_struct(const std::string& name) const {
    auto it = struct_by_name.find(name);
    return it == struct_by_name.end() ? nullptr : &structs[it->second];
  }
};

struct ResolveFailure {
  std::string reason;
};

struct ResolveOptions {
  // Probability that a declaration's initializer may see the symbol being
  // declared.  Produces the self-reference pattern deliberately: designs
  // that are syntactically fine but semantically bogus are part of a
  // fuzzer's useful output.  Strict mode turns it off.
  double self_ref_prob = 0.05;
};

// Replaces every identifier placeholder in a skeleton tree: declaration
// sites mint fresh `id_<n>` names, use sites draw uniformly from the
// in-scope symbols whose kind and direction fit the position.  Scope frames
// push at module/function/block entry and pop on exit.  When a use position
// has no candidate, a read position falls back to a random sized literal;
// anywhere else resolution fails and the caller reseeds.
Result<NamedDesign, ResolveFailure> resolve_scopes(const Tree& skeleton_tree, Rng& rng,
                                                   const ResolveOptions& opts = {});

enum class MemberNeed {
  Read,      // any value-bearing member
  WriteNet,  // continuous hierarchical target: internal nets of the callee
  WriteVar,  // procedural hierarchical target: internal variables / struct fields
};

// Uniform draw from the member table of `instance` (a struct variable's
// fields, or a module instance's internal declarations).
Result<std::string, ResolveFailure> resolve_namespace_member(const NamedDesign& design,
                                                             int module_idx,
                                                             const std::string& instance,
                                                             Rng& rng, MemberNeed need);

struct ScopeViolation {
  std::string message;
  int line = 0;
  int col = 0;
};

struct ScopeCheck {
  std::vector<ScopeViolation> violations;
  // Present when the walk completed with no violations; feeds type checking.
  std::optional<NamedDesign> design;
  bool ok() const { return violations.empty(); }
};

// Re-walks a concrete design verifying declaration-before-use, frame
// discipline, namespace membership, and flagging self-referential
// initializers.  Module and struct-type names resolve file-wide (the
// two-pass rule real tools apply); everything else is strictly
// declaration-before-use.
ScopeCheck check_scopes(const Tree& tree);

}  // namespace vgen
