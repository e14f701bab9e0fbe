#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgen/inject.hpp"
#include "vgen/pipeline.hpp"

namespace vgen {

// Every kernel here has a serial twin selected by ExecMode.  The parallel
// paths must produce byte-identical results -- slots depend only on their
// own derived seed, never on sibling state -- and the tests hold them to
// that.  Without OpenMP support Parallel degrades to the serial loop.
enum class ExecMode { Serial, Parallel };

// OpenMP worker count, 1 when built without OpenMP.
int thread_count();

struct PopulationItem {
  uint64_t seed = 0;  // per-slot seed, mix64(base_seed + index)
  bool ok = false;
  std::string text;   // rendered design when ok
  int tokens = 0;
  std::string error;  // failure reason when not ok
};

// One strictly valid small design per slot.
std::vector<PopulationItem> generate_population(const ProbabilityTable& table,
                                                uint64_t base_seed, int count,
                                                const PipelineOptions& opt,
                                                ExecMode mode);

// One grown design per slot (token budget per cfg).
std::vector<PopulationItem> grow_population(const ProbabilityTable& table,
                                            uint64_t base_seed, int count,
                                            const InjectionConfig& cfg, ExecMode mode);

// Context counting fanned out over disjoint tree shards, then merged.
// Counts sum commutatively, so the merged table matches the serial count
// exactly (same_counts).
ProbabilityTable count_sequences_sharded(const std::vector<Tree>& trees, int k,
                                         ExecMode mode);

}  // namespace vgen
