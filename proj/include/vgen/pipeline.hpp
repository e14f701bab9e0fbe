#pragma once

#include <cstdint>
#include <string>

#include "vgen/prob_table.hpp"
#include "vgen/result.hpp"
#include "vgen/rng.hpp"
#include "vgen/skeleton.hpp"
#include "vgen/types.hpp"

namespace vgen {

struct PipelineOptions {
  GenLimits limits;
  double tau = 1.0;            // sampling temperature
  double self_ref_prob = 0.05; // per-initializer self-reference coin
  bool strict = false;         // disables the coin: every output must check clean
  int max_attempts = 1000;     // candidate skeletons per design before giving up
};

// Where candidates died before one survived.
struct AtomStats {
  int skeleton_attempts = 0;  // skeletons drawn (successful one included)
  int limit_failures = 0;     // depth or node budget exceeded
  int scope_failures = 0;     // no symbol of the right kind to pick
  int type_failures = 0;      // unification conflict

  AtomStats& operator+=(const AtomStats& o) {
    skeleton_attempts += o.skeleton_attempts;
    limit_failures += o.limit_failures;
    scope_failures += o.scope_failures;
    type_failures += o.type_failures;
    return *this;
  }
};

// A design that made it through all three phases: sampled skeleton,
// resolved names, inferred and defaulted types.
struct ValidDesign {
  TypedDesign typed;
  uint64_t seed = 0;       // the seed that produced the surviving candidate
  AtomStats stats;
};

struct PipelineFailure {
  std::string reason;
  AtomStats stats;
};

// Draws skeletons from `seed`'s deterministic reseed chain until one
// resolves and types cleanly (or the attempt budget runs out).
Result<ValidDesign, PipelineFailure> generate_valid_design(const ProbabilityTable& table,
                                                           uint64_t seed,
                                                           const PipelineOptions& opts);

// Final source text of a finished design.
std::string render_design(const ValidDesign& d);

}  // namespace vgen
