#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "vgen/parser.hpp"
#include "vgen/trainer.hpp"

using namespace vgen;

namespace {

Tree tree_of(const std::string& text) {
  auto r = parse_design(text);
  REQUIRE(r.ok());
  return std::move(r.value());
}

uint64_t count_in(const ProbabilityTable& t, const ContextKey& ctx, NT nt, int rule) {
  const auto* row = t.find_row(ctx, nt);
  if (row == nullptr) return 0;
  for (const auto& [r, c] : row->counts)
    if (r == rule) return c;
  return 0;
}

ContextKey ctx_of(std::initializer_list<int32_t> ids) {
  ContextKey c;
  for (int32_t id : ids) {
    c.ids[c.len] = id;
    ++c.len;
  }
  return c;
}

}  // namespace

TEST_CASE("counting activations of a minimal module, by hand") {
  Tree t = tree_of("module m ;\nendmodule\n");
  ProbabilityTable counts = count_sequences({t}, 2);
  CHECK(counts.k() == 2);

  const Grammar& g = Grammar::get();
  int r_src = g.rules_for(NT::Source)[0];
  int r_cons = find_rule(NT::DescriptionList, {N(NT::Description), N(NT::DescriptionList)});
  int r_eps = find_rule(NT::DescriptionList, {});
  int r_desc = find_rule(NT::Description, {N(NT::ModuleDecl)});
  int r_mod = g.rules_for(NT::ModuleDecl)[0];
  int r_plo_empty = find_rule(NT::PortListOpt, {});
  int r_il_eps = find_rule(NT::ItemList, {});

  // The root has no rule-labeled ancestors; each level then pushes its
  // parent's rule, keeping the two most recent.
  CHECK(count_in(counts, {}, NT::Source, r_src) == 1);
  CHECK(count_in(counts, ctx_of({r_src}), NT::DescriptionList, r_cons) == 1);
  CHECK(count_in(counts, ctx_of({r_src, r_cons}), NT::Description, r_desc) == 1);
  CHECK(count_in(counts, ctx_of({r_src, r_cons}), NT::DescriptionList, r_eps) == 1);
  CHECK(count_in(counts, ctx_of({r_cons, r_desc}), NT::ModuleDecl, r_mod) == 1);
  CHECK(count_in(counts, ctx_of({r_desc, r_mod}), NT::PortListOpt, r_plo_empty) == 1);
  CHECK(count_in(counts, ctx_of({r_desc, r_mod}), NT::ItemList, r_il_eps) == 1);

  // Nothing else was counted: total activations == interior nodes.
  uint64_t total = 0;
  for (const auto& [key, row] : counts.observed_rows()) total += row.total;
  uint64_t interior = 0;
  for (int i = 0; i < t.size(); ++i)
    if (!t.is_leaf(i)) ++interior;
  CHECK(total == interior);
}

TEST_CASE("k = 0 folds every activation onto the empty context") {
  Tree t = tree_of("module m ( input a ) ; wire w ; endmodule");
  ProbabilityTable counts = count_sequences({t}, 0);
  for (const auto& [key, row] : counts.observed_rows()) CHECK(key.second.len == 0);
}

TEST_CASE("training twice on the same file doubles every count") {
  Tree t = tree_of("module m ; wire w ; endmodule");
  ProbabilityTable once = count_sequences({t}, 3);
  ProbabilityTable twice = count_sequences({t, t}, 3);
  auto a = once.observed_rows();
  auto b = twice.observed_rows();
  REQUIRE(a.size() == b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    CHECK(ia->first == ib->first);
    CHECK(ib->second.total == 2 * ia->second.total);
  }
}

TEST_CASE("the curation sieve separates clean, broken and ill-typed files") {
  std::vector<CorpusFile> files = {
      {"good.v", "module a ; wire w ; endmodule"},
      {"syntax.v", "module b ; wire w endmodule"},
      {"semantic.v", "module c ; assign q = 1'd0 ; endmodule"},
      {"family.v", "module d ; wire w ; always @ ( * ) w = 1'd1 ; endmodule"},
  };
  CorpusReport rep = curate_corpus(files);
  REQUIRE(rep.accepted.size() == 1);
  CHECK(rep.accepted[0] == "good.v");
  REQUIRE(rep.rejected.size() == 3);
  for (const auto& rej : rep.rejected) CHECK(!rej.error.empty());

  // With the semantic sieve off, only the parser filters.
  CorpusReport lax = curate_corpus(files, false);
  CHECK(lax.accepted.size() == 3);
  CHECK(lax.rejected.size() == 1);
  CHECK(lax.rejected[0].name == "syntax.v");

  // Token counts cover exactly the accepted files.
  REQUIRE(rep.token_counts.size() == 1);
  CHECK(rep.token_counts[0].first == "good.v");
  CHECK(rep.token_counts[0].second == 7);
}

TEST_CASE("train_corpus end to end over the fixture corpus") {
  auto files = load_corpus_dir(std::string(VGEN_FIXTURE_DIR) + "/corpus");
  REQUIRE(files.size() == 3);
  // Deterministic path order.
  CHECK(files[0].name < files[1].name);
  CHECK(files[1].name < files[2].name);

  TrainResult tr = train_corpus(files, 2);
  CHECK(tr.report.accepted.size() == 3);
  CHECK(tr.report.rejected.empty());
  CHECK(tr.table.finalized());
  CHECK(tr.table.k() == 2);

  // Known fixture token counts anchor the lexer/curation path.
  for (const auto& [name, count] : tr.report.token_counts) {
    if (name.find("tiny") != std::string::npos) CHECK(count == 4);
    if (name.find("counter") != std::string::npos) CHECK(count == 126);
    if (name.find("gadgets") != std::string::npos) CHECK(count == 399);
  }

  // Counting is indifferent to file order.
  auto reversed = files;
  std::reverse(reversed.begin(), reversed.end());
  TrainResult tr2 = train_corpus(reversed, 2);
  CHECK(tr.table.same_counts(tr2.table));
}

TEST_CASE("training at k equals reducing a deeper table") {
  auto files = load_corpus_dir(std::string(VGEN_FIXTURE_DIR) + "/corpus");
  TrainResult deep = train_corpus(files, 4);
  TrainResult flat = train_corpus(files, 1);
  CHECK(deep.table.reduced(1).same_counts(flat.table));
}

TEST_CASE("median band selection prefers files nearest the median") {
  std::vector<std::pair<std::string, int>> counts = {
      {"a.v", 10}, {"b.v", 20}, {"c.v", 30}, {"d.v", 22}};
  auto band = select_median_band(counts, 2);
  CHECK(band == std::vector<std::string>{"b.v", "d.v"});

  // Ties prefer the smaller file, then the earlier name.
  std::vector<std::pair<std::string, int>> tied = {
      {"x.v", 24}, {"y.v", 16}, {"z.v", 20}};
  auto one = select_median_band(tied, 1);
  CHECK(one == std::vector<std::string>{"z.v"});
  auto two = select_median_band(tied, 2);
  CHECK(two == std::vector<std::string>{"y.v", "z.v"});

  CHECK(select_median_band({}, 3).empty());
  CHECK(select_median_band(counts, 0).empty());
  CHECK(select_median_band(counts, 99).size() == 4);
}

TEST_CASE("corpus report renders to JSON with the expected fields") {
  CorpusReport rep;
  rep.accepted = {"a.v"};
  rep.rejected.push_back({"b.v", "line 1:1: nope"});
  rep.token_counts = {{"a.v", 12}};
  std::string js = corpus_report_json(rep);
  CHECK(js.find("\"accepted\"") != std::string::npos);
  CHECK(js.find("\"rejected\"") != std::string::npos);
  CHECK(js.find("b.v") != std::string::npos);
  CHECK(js.find("nope") != std::string::npos);
}
