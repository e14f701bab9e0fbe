#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vgen/grammar.hpp"
#include "vgen/result.hpp"

namespace vgen {

constexpr int kMaxContextDepth = 6;

// The production history conditioning a rule choice: up to K rule ids, most
// recent last.  Histories shorter than K (near the derivation root) are
// legitimate distinct keys.  Fixed-size storage keeps the sampling path
// allocation-free.
struct ContextKey {
  uint8_t len = 0;
  std::array<int32_t, kMaxContextDepth> ids{};

  bool operator==(const ContextKey& o) const {
    if (len != o.len) return false;
    for (int i = 0; i < len; ++i)
      if (ids[i] != o.ids[i]) return false;
    return true;
  }
  bool operator<(const ContextKey& o) const {
    for (int i = 0; i < len && i < o.len; ++i)
      if (ids[i] != o.ids[i]) return ids[i] < o.ids[i];
    return len < o.len;
  }
};

// Appends `rule` to `ctx`, keeping only the most recent `k` entries.
ContextKey ctx_push(const ContextKey& ctx, int rule, int k);
// Suffix of a full history, length min(k, history length).
ContextKey context_key(const std::vector<int>& history, int k);
std::string ctx_to_string(const ContextKey& ctx);
// Drops the oldest entry (len must be > 0).
ContextKey ctx_drop_oldest(const ContextKey& ctx);

struct Distribution {
  // (rule id, probability), each probability > 0, summing to 1.
  std::vector<std::pair<int, double>> outcomes;
};

// p -> p^(1/tau), renormalized.  tau == 1 returns the input bit-for-bit
// (no pow round-trip), tau > 1 flattens, tau -> 0 sharpens toward the max.
// Throws std::invalid_argument for tau <= 0.
Distribution apply_temperature(const Distribution& dist, double tau);

// Picks an outcome given u in [0,1): cumulative scan in listed order.
int sample_distribution(const Distribution& dist, double u);

class TableError : public std::runtime_error {
public:
  explicit TableError(const std::string& what) : std::runtime_error(what) {}
};

// Occurrence counts per (context, nonterminal, rule) with derived
// probabilities.  Counts stay exact; probabilities are computed on demand,
// so retraining and serialization lose nothing.
//
// Rows observed in training are the ground truth.  finalize() completes the
// table so generation is total: every nonterminal gets an empty-context row
// (its marginal over all observed contexts, or a uniform row if the corpus
// never exercised it).  Derived rows are not serialized; deserialization
// recomputes them.
//
// Immutable after finalize(); safe to share across generation threads.
class ProbabilityTable {
public:
  struct Row {
    std::vector<std::pair<int32_t, uint64_t>> counts;  // (rule id, count), rule-sorted
    uint64_t total = 0;
    bool derived = false;  // completion row, not an observation

    bool operator==(const Row&) const = default;
  };
  using Key = std::pair<int32_t, ContextKey>;  // (nonterminal, context)

  ProbabilityTable() = default;
  explicit ProbabilityTable(int k) : k_(k) {}

  int k() const { return k_; }
  void set_k(int k) { k_ = k; }

  void add_count(const ContextKey& ctx, NT nt, int rule, uint64_t n = 1);

  // Completes empty-context rows and checks invariants (rule lhs matches
  // the row's nonterminal, positive totals).  Must be called before lookup.
  void finalize();
  bool finalized() const { return finalized_; }

  // Trained distribution for (ctx, nt); on a miss, drops the oldest context
  // entry until a row matches.  Total after finalize(): the empty-context
  // row always exists.
  Distribution lookup_distribution(const ContextKey& ctx, NT nt) const;

  // Row access for tests and tooling.  Returns nullptr if absent.
  const Row* find_row(const ContextKey& ctx, NT nt) const;
  // Observed (non-derived) rows in canonical order.
  std::map<Key, Row> observed_rows() const;

  // Counts aggregated onto contexts of depth `k` <= k().  Produces exactly
  // the table that training at depth k on the same corpus would have built.
  ProbabilityTable reduced(int k) const;

  bool same_counts(const ProbabilityTable& o) const;

private:
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = 1469598103934665603ull ^ static_cast<uint64_t>(k.first);
      for (int i = 0; i < k.second.len; ++i) {
        h ^= static_cast<uint64_t>(k.second.ids[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return static_cast<size_t>(h * 1099511628211ull);
    }
  };

  int k_ = 1;
  bool finalized_ = false;
  std::unordered_map<Key, Row, KeyHash> entries_;
};

// Text round-trip.  The format is a flat key/value document: a header
// (grammar_version, k), then one record per observed (context, nonterminal)
// with one `rule <id>: <count>` line per outcome.  Canonical order, so
// serialization is byte-stable.  deserialize_table raises TableError with a
// line number on malformed input and rejects unknown keys outright.
std::string serialize_table(const ProbabilityTable& table);
ProbabilityTable deserialize_table(const std::string& text);

ProbabilityTable load_table_file(const std::string& path);
void save_table_file(const ProbabilityTable& table, const std::string& path);

}  // namespace vgen
