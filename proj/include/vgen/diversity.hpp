#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "vgen/result.hpp"
#include "vgen/token.hpp"
#include "vgen/tree.hpp"

namespace vgen {

struct DiversityReport {
  int population = 0;  // files that lexed and parsed
  std::vector<std::string> skipped;
  int n = 4;
  int unique_productions = 0;
  int64_t unique_ngrams = 0;
  int64_t total_tokens = 0;
  std::vector<std::pair<std::string, int>> per_file_tokens;
};

// Streaming set-union accumulator behind the population metrics, so a
// large population can be measured without holding every tree at once.
// Adding a file never decreases either cardinality.
class DiversityAccumulator {
 public:
  explicit DiversityAccumulator(int n = 4);

  // Lex + parse `text`; on success folds its rules and n-grams in, on
  // failure records `name` as skipped.  Returns whether it parsed.
  bool add_text(const std::string& name, const std::string& text);

  // Folds in an already-parsed design and its token sequence.
  void add_tree(const Tree& tree);
  void add_tokens(const std::string& name, const std::vector<Token>& tokens);

  int unique_productions_count() const { return static_cast<int>(rules_.size()); }
  int64_t unique_ngrams() const { return static_cast<int64_t>(ngrams_.size()); }
  DiversityReport report() const;

 private:
  int n_;
  std::set<int> rules_;
  std::set<std::vector<uint8_t>> ngrams_;
  DiversityReport partial_;
};

// Distinct production rules over the union of all parses; unparseable
// texts are ignored (the accumulator records them when skipping matters).
int unique_productions(const std::vector<std::string>& texts);

// Distinct length-n windows of token kinds, unioned across texts.
// Identifiers collapse to one alphabet symbol, each keyword keeps its own.
int64_t ngram_diversity(const std::vector<std::string>& texts, int n);

// Length of the token sequence (lexical errors propagate).
Result<int, LexError> token_count(const std::string& text);

// Scans every *.v under `dir` (recursive, path-sorted).
DiversityReport scan_directory(const std::string& dir, int n);

std::string diversity_report_json(const DiversityReport& report);

}  // namespace vgen
