#pragma once

#include <map>
#include <string>
#include <vector>

#include "vgen/types.hpp"

namespace vgen {

// A control-flow graph small enough for exact analysis.  Node 0 is the
// entry.  Each node carries the definitions it executes, in order; a later
// definition of a symbol inside one node supersedes an earlier one.
struct Cfg {
  struct CfgNode {
    std::vector<int> succ;
    std::vector<int> defs;  // definition ids, in execution order
  };
  std::vector<CfgNode> nodes;
  std::vector<int> def_symbol;  // definition id -> symbol id
};

// Forward may-analysis: in[n] = union of out[p] over predecessors,
// out[n] = gen[n] ∪ (in[n] − kill[n]), iterated to a fixed point.
// Returns one bitset per node over definition ids: the definitions
// reaching the node's start.
std::vector<std::vector<bool>> solve_reaching(const Cfg& cfg);

// Reference solution by enumeration of simple paths: definition d (in node
// m) reaches node p exactly when some path m -> p repeats no interior node
// and no node strictly between the two endpoints redefines d's symbol.
// Exponential; for small graphs and tests only.
std::vector<std::vector<bool>> enumerate_reaching(const Cfg& cfg);

// A symbol visible at a program point, with everything injection needs to
// judge compatibility.
struct ReachingSym {
  std::string name;
  SymKind kind = SymKind::Net;
  Direction dir = Direction::None;
  ConcreteType type;
};

// Reaching symbols for one module, at two granularities: the insertion
// boundaries between items (boundary b sits before item b; boundary
// item_count is the end of the module), and the start of every procedural
// statement.
struct ModuleReaching {
  std::vector<std::vector<ReachingSym>> at_boundary;  // size item_count + 1
  std::map<int, std::vector<ReachingSym>> at_statement;  // Statement tree node -> syms
};

// Builds the module's CFG -- items in a linear chain, with always/initial
// bodies expanded into branching statement subgraphs -- and solves it.
// Ports define at entry; declarations define; assignments (continuous,
// procedural, gate outputs, instance output connections) redefine.
ModuleReaching reaching_map(const TypedDesign& td, int module_idx);

}  // namespace vgen
