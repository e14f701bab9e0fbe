#pragma once

#include <string>
#include <vector>

#include "vgen/prob_table.hpp"
#include "vgen/tree.hpp"

namespace vgen {

struct CorpusFile {
  std::string name;
  std::string text;
};

// Partition of a corpus after sieving.  Per-file failures are data here,
// never exceptions: a fuzzing corpus scraped from the wild is expected to
// contain broken files.
struct CorpusReport {
  std::vector<std::string> accepted;
  struct Rejection {
    std::string name;
    std::string error;  // first syntax or semantic diagnostic
  };
  std::vector<Rejection> rejected;
  std::vector<std::pair<std::string, int>> token_counts;  // accepted files only
};

// Runs the two sieves over the corpus: parse with the mini-Verilog grammar,
// then (when `semantic` is set) re-run scope and type checking on the parse
// tree.  Files failing either sieve land in `rejected` with the first
// diagnostic.
CorpusReport curate_corpus(const std::vector<CorpusFile>& files, bool semantic = true);

// Counts one activation per tree node, keyed by the context of the K
// nearest rule-labeled ancestors on the root-to-node path.  The same
// context function drives generation; keeping the two in lockstep is what
// makes trained probabilities meaningful.
ProbabilityTable count_sequences(const std::vector<Tree>& trees, int k);

// Normalizes raw counts into a finalized table (probability per row =
// count / row total), completing empty-context rows per the table's
// completion policy.
ProbabilityTable build_table(ProbabilityTable counts);

// parse + sieve + count + finalize for the accepted subset.
struct TrainResult {
  CorpusReport report;
  ProbabilityTable table;
};
TrainResult train_corpus(const std::vector<CorpusFile>& files, int k, bool semantic = true);

// Picks `n` accepted file names closest to the corpus median token count
// (ties broken toward smaller files, then by name).  Utility for carving a
// training subset out of a large scrape.
std::vector<std::string> select_median_band(
    const std::vector<std::pair<std::string, int>>& token_counts, size_t n);

// Loads every *.v file under `dir` (recursive), sorted by path so training
// is deterministic.
std::vector<CorpusFile> load_corpus_dir(const std::string& dir);

// JSON rendering of a CorpusReport for the CLI's stdout summary.
std::string corpus_report_json(const CorpusReport& report);

}  // namespace vgen
