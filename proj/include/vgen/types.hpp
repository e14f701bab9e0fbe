#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgen/result.hpp"
#include "vgen/scope.hpp"

namespace vgen {

enum class Family : uint8_t { Net, Var };

// A partially known type: each facet is either pinned or open.  Unification
// fills facets in; defaulting grounds whatever stays open.
struct TypePattern {
  std::optional<Family> family;
  std::optional<int> width;
  std::optional<bool> is_signed;

  bool ground() const { return family && width && is_signed; }
  bool operator==(const TypePattern&) const = default;
};

std::string pattern_to_string(const TypePattern& p);

struct ConcreteType {
  Family family = Family::Net;
  int width = 1;
  bool is_signed = false;
  bool operator==(const ConcreteType&) const = default;
};

// How much a declaration pins down before inference runs.
enum class TypeFactMode {
  // Generation: keyword-less ports leave family open, a missing range
  // leaves width open, absent `signed` leaves signedness open.  Inference
  // then propagates real commitments into the holes.
  OpenFacets,
  // Checking: absent syntax means the language default (net, width 1,
  // unsigned), matching how a compiler reads the same text.
  ConcreteDefaults,
};

enum class CondForm : uint8_t { SameN, NPlus1, MaxOfTwo };

struct Constraint {
  enum class Kind : uint8_t { EqVarVar, EqVarPat, Cond } kind;
  int a = -1;  // tvar
  int b = -1;  // tvar (EqVarVar, Cond antecedent2 for MaxOfTwo)
  TypePattern pat;       // EqVarPat
  CondForm form = CondForm::SameN;  // Cond
  int dest = -1;                    // Cond consequent tvar
  int line = 0;                     // source anchor for conflict reports
  int col = 0;
};

struct FamilyRequirement {
  int tvar = -1;
  Family required = Family::Net;
  std::string origin;  // for diagnostics: what position demanded it
  int line = 0;
  int col = 0;
};

struct TypeError {
  std::string message;
  int line = 0;
  int col = 0;
};

struct ConstraintSet {
  int num_tvars = 0;
  std::vector<Constraint> constraints;        // Eq and Cond entries
  std::vector<FamilyRequirement> family_reqs; // side conditions, not pairs
  // Errors found while emitting (bad range or part-select bounds); solving
  // refuses a set that carries any.
  std::vector<TypeError> errors;
  // (module index, symbol name) -> tvar.  Function-local names use the
  // composite key "<function>.<port>".
  std::map<std::pair<int, std::string>, int> symbol_tvars;
  // (module index, function name) -> return tvar
  std::map<std::pair<int, std::string>, int> return_tvars;

  int fresh() { return num_tvars++; }
};

struct TypeEnvironment {
  // Resolved pattern per tvar after unification (pre-defaulting facets may
  // remain open).
  std::vector<TypePattern> resolved;
  std::map<std::pair<int, std::string>, int> symbol_tvars;

  const TypePattern& of_tvar(int t) const { return resolved[t]; }
  const TypePattern* of_symbol(int module_idx, const std::string& name) const {
    auto it = symbol_tvars.find({module_idx, name});
    return it == symbol_tvars.end() ? nullptr : &resolved[it->second];
  }
};

struct TypedDesign {
  NamedDesign design;
  TypeEnvironment env;
  // Fully grounded types per module symbol, after defaulting.
  std::vector<std::map<std::string, ConcreteType>> symbol_types;

  const ConcreteType* type_of(int module_idx, const std::string& name) const {
    auto& m = symbol_types[module_idx];
    auto it = m.find(name);
    return it == m.end() ? nullptr : &it->second;
  }
};

// Emits equality and conditional constraints by walking every expression
// with the type it must produce (destination passing).  Family demands that
// come from position rather than from operand shapes (procedural targets,
// continuous targets, gate pins, output-port connections) go to the side
// list, not the pair list.
ConstraintSet generate_constraints(const NamedDesign& design, TypeFactMode mode);

// Union-find unification with an and-semilattice on signedness (mixed
// operands fall back to unsigned rather than erroring) and a fire-once
// worklist for conditional width rules.  Width and family disagreements on
// ground facets are errors; the family side list merges last so its
// diagnostics can name the offending position.
Result<TypeEnvironment, TypeError> unify(const ConstraintSet& set, const NamedDesign& design);

// Grounds every still-open facet (net, width 1, unsigned — with variable
// output ports kept as variables) and materializes the committed types back
// into the open syntax slots so the printed text round-trips.
TypedDesign apply_defaults(TypeEnvironment env, NamedDesign design);

// generate_constraints + unify + apply_defaults.
Result<TypedDesign, TypeError> infer(NamedDesign design, TypeFactMode mode);

// Folds an expression subtree to an integer using the visible parameter
// bindings.  Handles literals, parameters, parenthesization, unary minus,
// and +/- chains; anything else is not a constant in this dialect.
std::optional<int64_t> fold_const_subtree(const Tree& tree, int node,
                                          const std::map<std::string, int64_t>& params);

}  // namespace vgen
