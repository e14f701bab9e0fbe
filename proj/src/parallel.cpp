#include "vgen/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vgen/trainer.hpp"

namespace vgen {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

PopulationItem make_atom_item(const ProbabilityTable& table, uint64_t slot_seed,
                              const PipelineOptions& opt) {
  PopulationItem item;
  item.seed = slot_seed;
  auto r = generate_valid_design(table, slot_seed, opt);
  if (r.ok()) {
    item.ok = true;
    item.text = render_design(r.value());
    item.tokens = r.value().typed.design.tree.leaf_count();
  } else {
    item.error = r.error().reason;
  }
  return item;
}

PopulationItem make_grown_item(const ProbabilityTable& table, uint64_t slot_seed,
                               const InjectionConfig& cfg) {
  PopulationItem item;
  item.seed = slot_seed;
  auto r = grow_design(table, slot_seed, cfg);
  if (r.ok()) {
    item.ok = true;
    item.text = print_tree(r.value().typed.design.tree);
    item.tokens = r.value().typed.design.tree.leaf_count();
  } else {
    item.error = r.error().reason;
  }
  return item;
}

}  // namespace

std::vector<PopulationItem> generate_population(const ProbabilityTable& table,
                                                uint64_t base_seed, int count,
                                                const PipelineOptions& opt,
                                                ExecMode mode) {
  std::vector<PopulationItem> items(count);
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      items[i] = make_atom_item(table, mix64(base_seed + static_cast<uint64_t>(i)), opt);
    }
  } else {
    for (int i = 0; i < count; ++i) {
      items[i] = make_atom_item(table, mix64(base_seed + static_cast<uint64_t>(i)), opt);
    }
  }
  return items;
}

std::vector<PopulationItem> grow_population(const ProbabilityTable& table,
                                            uint64_t base_seed, int count,
                                            const InjectionConfig& cfg, ExecMode mode) {
  std::vector<PopulationItem> items(count);
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      items[i] = make_grown_item(table, mix64(base_seed + static_cast<uint64_t>(i)), cfg);
    }
  } else {
    for (int i = 0; i < count; ++i) {
      items[i] = make_grown_item(table, mix64(base_seed + static_cast<uint64_t>(i)), cfg);
    }
  }
  return items;
}

ProbabilityTable count_sequences_sharded(const std::vector<Tree>& trees, int k,
                                         ExecMode mode) {
  if (mode == ExecMode::Serial) return count_sequences(trees, k);

  int shards = thread_count();
  if (shards < 1) shards = 1;
  std::vector<ProbabilityTable> partial(shards);

#pragma omp parallel for schedule(static)
  for (int s = 0; s < shards; ++s) {
    std::vector<Tree> mine;
    for (size_t i = s; i < trees.size(); i += shards) mine.push_back(trees[i]);
    partial[s] = count_sequences(mine, k);
  }

  ProbabilityTable merged(k);
  for (const ProbabilityTable& shard : partial) {
    for (const auto& [key, row] : shard.observed_rows()) {
      for (const auto& [rule, count] : row.counts) {
        merged.add_count(key.second, static_cast<NT>(key.first), rule, count);
      }
    }
  }
  return merged;
}

}  // namespace vgen
