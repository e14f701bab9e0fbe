#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/pipeline.hpp"
#include "vgen/reaching.hpp"

namespace vgen {

// One port of a pool module's signature, as injection matching sees it.
struct PortSig {
  std::string name;
  Direction dir = Direction::In;
  ConcreteType type;
};

// A module available for instantiation.  Its definition already lives in
// the accumulated design; `consumed` flips when an injection instantiates
// it, after which it is never picked again (primitive gates have no pool
// entry and never run out).
struct PoolEntry {
  std::string module_name;
  std::vector<PortSig> ports;
  bool consumed = false;
};

struct InjectionConfig {
  int token_budget = 150;  // T: grow until the design has at least this many tokens
  double gate_probability = 0.3;
  // Relative weights of the three injection kinds.
  double w_instantiation = 0.6;
  double w_function_call = 0.2;
  double w_hier_ref = 0.2;
  PipelineOptions atom;      // how each constituent design is produced
  int max_iterations = 2000; // hard stop regardless of budget
  int stall_limit = 100;     // consecutive token-free iterations before giving up
};

// Share of primitive-gate instantiations among all instantiations observed
// in training; 0.3 when the corpus has none of either.
double gate_probability_from(const ProbabilityTable& table);

// Every minted identifier ordinal shifted by `offset` -- tree lexemes and
// all symbol tables consistently -- so two generated designs can share one
// namespace without collisions.
NamedDesign rename_design(NamedDesign d, int offset);

// Appends src's descriptions to dst's tree and merges its tables.  src
// must already be renamed clear of dst's ordinals.
void append_design(NamedDesign& dst, const NamedDesign& src);

// Port signatures of every module in a design, read off the (defaulted)
// declaration syntax.
std::vector<PoolEntry> pool_entries(const NamedDesign& d);

// Directed module-instantiation edges (instantiator index, callee index).
std::vector<std::pair<int, int>> instantiation_edges(const NamedDesign& d);
// True when the instantiation graph admits a topological order.
bool instantiation_acyclic(const NamedDesign& d);

enum class InjectionKind { Instantiation, FunctionCall, HierRef };

struct GrowStats {
  int iterations = 0;
  int injections = 0;        // successful, any kind
  int gate_injections = 0;
  int module_injections = 0;
  int call_injections = 0;
  int hier_injections = 0;
  AtomStats atoms;
};

// Accumulates generated designs and wires them together.  Drives
// grow_design; exposed so tests can steer single injections.
class InjectionEngine {
 public:
  InjectionEngine(InjectionConfig cfg, uint64_t rng_seed);

  bool empty() const { return !has_design_; }
  const TypedDesign& typed() const { return typed_; }
  const NamedDesign& design() const { return typed_.design; }
  const std::vector<PoolEntry>& pool() const { return pool_; }
  int tokens() const;

  // Renames the atom clear of the accumulated namespace, appends it, adds
  // its modules to the pool, and re-infers.
  void absorb(const ValidDesign& atom);

  // One injection attempt of the given kind.  True when the design grew;
  // false when no candidate fit (the design is unchanged).
  bool try_inject(InjectionKind kind, GrowStats* stats = nullptr);

 private:
  struct Point {
    int module_idx;
    int boundary;
    std::vector<ReachingSym> reaching;
  };

  bool inject_instantiation(GrowStats* stats);
  bool inject_function_call(GrowStats* stats);
  bool inject_hier_ref(GrowStats* stats);

  bool gate_compatible(const Point& p) const;
  // Pool indices with a full port matching at p whose instantiation in
  // p's module keeps the graph acyclic.
  std::vector<int> matchable_pool(const Point& p) const;
  bool place_gate(const Point& p);
  bool place_module(const Point& p, int pool_idx);
  // Re-infer after a structural edit; reverts and reports false if typing
  // broke (defensive: matched injections should always type).
  bool reinfer_or_revert(const TypedDesign& snapshot);

  std::string mint();
  void insert_item(int module_idx, int boundary, int item_node);
  void register_instance(int module_idx, const std::string& name,
                         const std::string& instance_of, int decl_node, int boundary);
  bool creates_cycle(const std::string& callee, int host_idx) const;

  InjectionConfig cfg_;
  Rng rng_;
  bool has_design_ = false;
  TypedDesign typed_;
  std::vector<PoolEntry> pool_;
};

struct GrownDesign {
  TypedDesign typed;
  uint64_t seed = 0;
  GrowStats stats;
};

struct GrowFailure {
  std::string reason;
  GrowStats stats;
};

// The growth loop: generate a small valid design, absorb it, attempt one
// injection (kind drawn from the config weights), until the token budget
// is met.
Result<GrownDesign, GrowFailure> grow_design(const ProbabilityTable& table, uint64_t seed,
                                             const InjectionConfig& cfg);

}  // namespace vgen
