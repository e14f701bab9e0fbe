#include <doctest.h>

#include <string>
#include <vector>

#include "vgen/diversity.hpp"
#include "vgen/inject.hpp"
#include "vgen/parser.hpp"
#include "vgen/trainer.hpp"

using namespace vgen;

namespace {

const std::string kTiny = "module m ;\nendmodule\n";

const ProbabilityTable& fixture_table() {
  static const ProbabilityTable table = [] {
    auto files = load_corpus_dir(std::string(VGEN_FIXTURE_DIR) + "/corpus");
    return train_corpus(files, 2).table;
  }();
  return table;
}

}  // namespace

TEST_CASE("token_count counts tokens and propagates lexical errors") {
  auto r = token_count("wire w ;");
  REQUIRE(r.ok());
  CHECK(r.value() == 3);
  CHECK(token_count("").value() == 0);
  CHECK(token_count(kTiny).value() == 4);
  CHECK(!token_count("wire ` ;").ok());
}

TEST_CASE("a minimal module uses exactly its derivation's seven rules") {
  // Source, description cons + nil, the module description, the module
  // itself, empty ports, empty items: seven distinct productions.
  CHECK(unique_productions({kTiny}) == 7);
  CHECK(unique_productions({kTiny, kTiny, kTiny}) == 7);  // duplicates add nothing
  CHECK(unique_productions({}) == 0);
}

TEST_CASE("adding a richer file only grows the production set") {
  int base = unique_productions({kTiny});
  int more = unique_productions({kTiny, "module n ( input a ) ; wire w ; endmodule"});
  CHECK(more > base);
}

TEST_CASE("n-gram windows slide over the token kinds") {
  // 4 tokens, n = 4: exactly one window.
  CHECK(ngram_diversity({kTiny}, 4) == 1);
  CHECK(ngram_diversity({kTiny, kTiny}, 4) == 1);
  // n = 1: the distinct token kinds (module, identifier, ;, endmodule).
  CHECK(ngram_diversity({kTiny}, 1) == 4);
  // n longer than the sequence: no window at all.
  CHECK(ngram_diversity({kTiny}, 5) == 0);
  // Identifiers collapse: renaming the module changes nothing.
  CHECK(ngram_diversity({kTiny, "module other ;\nendmodule\n"}, 4) == 1);
  // A number does not collapse into the identifier kind.
  CHECK(ngram_diversity({"module m ; wire a ; assign a = 1 ; endmodule",
                         "module m ; wire a ; assign a = a ; endmodule"},
                        3) >
        ngram_diversity({"module m ; wire a ; assign a = a ; endmodule"}, 3));
}

TEST_CASE("the accumulator reports population, skips and totals") {
  DiversityAccumulator acc(4);
  CHECK(acc.add_text("good.v", kTiny));
  CHECK(!acc.add_text("broken.v", "module m ; wire w endmodule"));
  CHECK(!acc.add_text("unlexable.v", "wire ` ;"));
  DiversityReport rep = acc.report();
  CHECK(rep.population == 1);
  REQUIRE(rep.skipped.size() == 2);
  CHECK(rep.skipped[0] == "broken.v");
  CHECK(rep.skipped[1] == "unlexable.v");
  CHECK(rep.n == 4);
  CHECK(rep.total_tokens == 4);
  CHECK(rep.unique_productions == 7);
  CHECK(rep.unique_ngrams == 1);
  REQUIRE(rep.per_file_tokens.size() == 1);
  CHECK(rep.per_file_tokens[0].first == "good.v");
  CHECK(rep.per_file_tokens[0].second == 4);
}

TEST_CASE("accumulation is monotone in both metrics") {
  DiversityAccumulator acc(3);
  int last_rules = 0;
  int64_t last_ngrams = 0;
  InjectionConfig cfg;
  cfg.token_budget = 60;
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    auto g = grow_design(fixture_table(), seed, cfg);
    REQUIRE(g.ok());
    acc.add_text("d" + std::to_string(seed),
                 print_tree(g.value().typed.design.tree));
    CHECK(acc.unique_productions_count() >= last_rules);
    CHECK(acc.unique_ngrams() >= last_ngrams);
    last_rules = acc.unique_productions_count();
    last_ngrams = acc.unique_ngrams();
  }
  CHECK(last_rules > 7);
  CHECK(last_ngrams > 1);
}

TEST_CASE("the union is subadditive across a split population") {
  std::vector<std::string> texts;
  InjectionConfig cfg;
  cfg.token_budget = 60;
  for (uint64_t seed = 20; seed < 28; ++seed) {
    auto g = grow_design(fixture_table(), seed, cfg);
    REQUIRE(g.ok());
    texts.push_back(print_tree(g.value().typed.design.tree));
  }
  std::vector<std::string> first(texts.begin(), texts.begin() + 4);
  std::vector<std::string> second(texts.begin() + 4, texts.end());
  int whole = unique_productions(texts);
  CHECK(whole <= unique_productions(first) + unique_productions(second));
  CHECK(whole >= unique_productions(first));
  CHECK(whole >= unique_productions(second));
}

TEST_CASE("directory scans pick up every design and note the failures") {
  DiversityReport corpus = scan_directory(std::string(VGEN_FIXTURE_DIR) + "/corpus", 4);
  CHECK(corpus.population == 3);
  CHECK(corpus.skipped.empty());
  CHECK(corpus.total_tokens == 4 + 126 + 399);

  // Of the bad fixtures only the syntax error fails to parse; the other
  // three are semantically bad but lex and parse fine.
  DiversityReport bad = scan_directory(std::string(VGEN_FIXTURE_DIR) + "/bad", 4);
  CHECK(bad.population == 3);
  REQUIRE(bad.skipped.size() == 1);
  CHECK(bad.skipped[0].find("missing_semi") != std::string::npos);
}

TEST_CASE("the JSON report carries the headline numbers") {
  DiversityReport rep;
  rep.population = 2;
  rep.n = 4;
  rep.unique_productions = 9;
  rep.unique_ngrams = 17;
  rep.total_tokens = 88;
  rep.skipped = {"x.v"};
  std::string js = diversity_report_json(rep);
  CHECK(js.find("\"population\"") != std::string::npos);
  CHECK(js.find("\"unique_productions\"") != std::string::npos);
  CHECK(js.find("17") != std::string::npos);
  CHECK(js.find("x.v") != std::string::npos);
}
