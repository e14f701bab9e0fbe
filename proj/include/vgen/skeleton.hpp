#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/prob_table.hpp"
#include "vgen/result.hpp"
#include "vgen/rng.hpp"
#include "vgen/tree.hpp"

namespace vgen {

struct GenLimits {
  int max_depth = 64;
  int max_nodes = 20000;
};

// A syntactically complete tree whose identifier leaves are placeholders
// (ID_0, ID_1, ...) and whose open type slots carry ordinals for annotated
// printing.  Scope resolution and type inference make it meaningful.
struct Skeleton {
  Tree tree;
  uint64_t seed = 0;
  std::vector<int32_t> rule_trace;  // rules in expansion (preorder) order
};

struct GenFailure {
  enum class Kind { DepthExceeded, NodesExceeded } kind;
  std::string message;
};

// Top-down leftmost derivation from the start symbol.  At each nonterminal
// the distribution for the current ancestor context is drawn (with
// temperature tau), so structure statistics follow the trained table.
// Literal leaves are minted from the same stream; identifier leaves become
// placeholders.  Failure (runaway recursion under a deep table) is a value:
// callers reseed rather than unwind.
Result<Skeleton, GenFailure> generate_skeleton(const ProbabilityTable& table, uint64_t seed,
                                               const GenLimits& limits = {}, double tau = 1.0);

// Test helper: parse concrete text and mark every identifier matching
// ID_<n> as a placeholder with that ordinal, yielding the skeleton that
// would have produced the text.
Skeleton make_skeleton_from_text(const std::string& text);

}  // namespace vgen
