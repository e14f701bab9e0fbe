#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "vgen/prob_table.hpp"

using namespace vgen;

namespace {

ContextKey ctx_of(std::initializer_list<int32_t> ids) {
  ContextKey c;
  for (int32_t id : ids) {
    c.ids[c.len] = id;
    ++c.len;
  }
  return c;
}

// Two rule ids sharing a left-hand side, for building valid rows.
struct AltPair {
  NT nt;
  int a;
  int b;
};

AltPair item_alts() {
  const auto& alts = Grammar::get().rules_for(NT::Item);
  return {NT::Item, alts[0], alts[1]};
}

double prob_of(const Distribution& d, int rule) {
  for (const auto& [r, p] : d.outcomes)
    if (r == rule) return p;
  return 0.0;
}

}  // namespace

TEST_CASE("ctx_push keeps the most recent k entries") {
  ContextKey c;
  c = ctx_push(c, 10, 3);
  c = ctx_push(c, 11, 3);
  c = ctx_push(c, 12, 3);
  CHECK(c == ctx_of({10, 11, 12}));
  c = ctx_push(c, 13, 3);
  CHECK(c == ctx_of({11, 12, 13}));  // oldest dropped, most recent last
  ContextKey zero = ctx_push(c, 14, 0);
  CHECK(zero.len == 0);
}

TEST_CASE("context_key takes the suffix of a history") {
  std::vector<int> hist = {1, 2, 3, 4, 5};
  CHECK(context_key(hist, 2) == ctx_of({4, 5}));
  CHECK(context_key(hist, 6) == ctx_of({1, 2, 3, 4, 5}));
  CHECK(context_key(hist, 0).len == 0);
  CHECK(context_key({}, 3).len == 0);
}

TEST_CASE("ctx_drop_oldest removes the front entry") {
  ContextKey c = ctx_of({7, 8, 9});
  CHECK(ctx_drop_oldest(c) == ctx_of({8, 9}));
  CHECK(ctx_drop_oldest(ctx_of({7})).len == 0);
}

TEST_CASE("context keys order and compare consistently") {
  CHECK(ctx_of({1, 2}) == ctx_of({1, 2}));
  CHECK(!(ctx_of({1, 2}) == ctx_of({1, 3})));
  CHECK(!(ctx_of({1, 2}) == ctx_of({1, 2, 3})));
  CHECK(ctx_of({1, 2}) < ctx_of({1, 3}));
  CHECK(ctx_of({1}) < ctx_of({1, 2}));  // shorter first on shared prefix
}

TEST_CASE("counts become relative frequencies per row") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable t(2);
  ContextKey c = ctx_of({3, 4});
  t.add_count(c, nt, ra, 3);
  t.add_count(c, nt, rb, 1);
  t.finalize();

  Distribution d = t.lookup_distribution(c, nt);
  REQUIRE(d.outcomes.size() == 2);
  CHECK(prob_of(d, ra) == doctest::Approx(0.75));
  CHECK(prob_of(d, rb) == doctest::Approx(0.25));
}

TEST_CASE("unseen contexts back off to the empty-context marginal") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable t(2);
  t.add_count(ctx_of({3, 4}), nt, ra, 9);
  t.add_count(ctx_of({5, 4}), nt, rb, 1);
  t.finalize();

  // {8, 4} shares a recent entry with trained rows but was never observed;
  // intermediate depths were not trained either, so the marginal answers.
  Distribution d = t.lookup_distribution(ctx_of({8, 4}), nt);
  CHECK(prob_of(d, ra) == doctest::Approx(0.9));
  CHECK(prob_of(d, rb) == doctest::Approx(0.1));

  // The marginal row exists, is flagged derived, and is not "observed".
  const auto* row = t.find_row(ContextKey{}, nt);
  REQUIRE(row != nullptr);
  CHECK(row->derived);
  CHECK(row->total == 10);
  for (const auto& [key, obs] : t.observed_rows()) CHECK(!obs.derived);
}

TEST_CASE("a nonterminal the corpus never exercised completes to uniform") {
  auto [nt, ra, rb] = item_alts();
  (void)rb;
  ProbabilityTable t(1);
  t.add_count(ctx_of({2}), nt, ra, 5);
  t.finalize();

  Distribution d = t.lookup_distribution(ContextKey{}, NT::CaseStmt);
  const auto& alts = Grammar::get().rules_for(NT::CaseStmt);
  REQUIRE(d.outcomes.size() == alts.size());
  for (const auto& [r, p] : d.outcomes)
    CHECK(p == doctest::Approx(1.0 / static_cast<double>(alts.size())));
}

TEST_CASE("every distribution sums to one") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable t(2);
  t.add_count(ctx_of({1, 2}), nt, ra, 7);
  t.add_count(ctx_of({1, 2}), nt, rb, 13);
  t.add_count(ctx_of({9}), nt, rb, 2);
  t.finalize();
  for (const auto& ctx : {ctx_of({1, 2}), ctx_of({9}), ContextKey{}}) {
    Distribution d = t.lookup_distribution(ctx, nt);
    double sum = 0;
    for (const auto& [r, p] : d.outcomes) {
      CHECK(p > 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("temperature one is the identity, bit for bit") {
  Distribution d;
  d.outcomes = {{1, 0.3}, {2, 0.7}};
  Distribution e = apply_temperature(d, 1.0);
  REQUIRE(e.outcomes.size() == 2);
  CHECK(e.outcomes[0].second == 0.3);  // exact, no pow round-trip
  CHECK(e.outcomes[1].second == 0.7);
}

TEST_CASE("temperature above one flattens, below one sharpens") {
  Distribution d;
  d.outcomes = {{1, 0.8}, {2, 0.2}};

  Distribution flat = apply_temperature(d, 2.0);
  double expect = std::sqrt(0.8) / (std::sqrt(0.8) + std::sqrt(0.2));
  CHECK(flat.outcomes[0].second == doctest::Approx(expect).epsilon(1e-12));
  CHECK(flat.outcomes[0].second < 0.8);
  CHECK(flat.outcomes[0].second + flat.outcomes[1].second ==
        doctest::Approx(1.0).epsilon(1e-12));

  Distribution sharp = apply_temperature(d, 0.5);
  CHECK(sharp.outcomes[0].second == doctest::Approx(0.64 / 0.68).epsilon(1e-12));
  CHECK(sharp.outcomes[0].second > 0.8);
}

TEST_CASE("non-positive temperature is rejected") {
  Distribution d;
  d.outcomes = {{1, 1.0}};
  CHECK_THROWS_AS(apply_temperature(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_temperature(d, -1.5), std::invalid_argument);
}

TEST_CASE("sampling walks the cumulative distribution in listed order") {
  Distribution d;
  d.outcomes = {{5, 0.3}, {7, 0.5}, {9, 0.2}};
  CHECK(sample_distribution(d, 0.0) == 5);
  CHECK(sample_distribution(d, 0.2999) == 5);
  CHECK(sample_distribution(d, 0.3) == 7);
  CHECK(sample_distribution(d, 0.7999) == 7);
  CHECK(sample_distribution(d, 0.8) == 9);
  CHECK(sample_distribution(d, 0.999999) == 9);
}

TEST_CASE("reduced(k) equals training at k") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable deep(3);
  deep.add_count(ctx_of({1, 2, 3}), nt, ra, 4);
  deep.add_count(ctx_of({9, 2, 3}), nt, ra, 1);
  deep.add_count(ctx_of({9, 8, 3}), nt, rb, 2);
  deep.add_count(ctx_of({2, 3}), nt, rb, 5);  // short history near the root
  deep.finalize();

  ProbabilityTable shallow(1);
  // Truncating each context to its most recent entry merges the first three
  // rows onto {3} and the short row too.
  shallow.add_count(ctx_of({3}), nt, ra, 5);
  shallow.add_count(ctx_of({3}), nt, rb, 7);
  shallow.finalize();

  ProbabilityTable red = deep.reduced(1);
  CHECK(red.k() == 1);
  CHECK(red.finalized());
  CHECK(red.same_counts(shallow));

  ProbabilityTable same = deep.reduced(3);
  CHECK(same.same_counts(deep));

  CHECK_THROWS_AS(deep.reduced(4), TableError);
}

TEST_CASE("serialization round-trips byte for byte") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable t(2);
  t.add_count(ctx_of({1, 2}), nt, ra, 3);
  t.add_count(ctx_of({4}), nt, rb, 11);
  t.add_count(ContextKey{}, NT::Statement, Grammar::get().rules_for(NT::Statement)[0], 2);
  t.finalize();

  std::string s1 = serialize_table(t);
  ProbabilityTable back = deserialize_table(s1);
  CHECK(back.k() == 2);
  CHECK(back.finalized());
  CHECK(back.same_counts(t));
  CHECK(serialize_table(back) == s1);

  // Derived completion rows are recomputed, not stored.
  CHECK(s1.find("derived") == std::string::npos);
  Distribution d = back.lookup_distribution(ctx_of({7, 7}), nt);
  CHECK(prob_of(d, ra) > 0.0);
}

TEST_CASE("malformed table text reports a line and rejects unknown keys") {
  auto [nt, ra, rb] = item_alts();
  (void)rb;
  ProbabilityTable t(1);
  t.add_count(ctx_of({1}), nt, ra, 1);
  t.finalize();
  std::string good = serialize_table(t);

  CHECK_THROWS_AS(deserialize_table("complete nonsense\n"), TableError);
  CHECK_THROWS_AS(deserialize_table(good + "mystery_key 42\n"), TableError);
  try {
    deserialize_table("complete nonsense\n");
    CHECK(false);
  } catch (const TableError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("same_counts distinguishes genuinely different tables") {
  auto [nt, ra, rb] = item_alts();
  ProbabilityTable a(1), b(1), c(1);
  a.add_count(ctx_of({1}), nt, ra, 2);
  b.add_count(ctx_of({1}), nt, ra, 2);
  c.add_count(ctx_of({1}), nt, rb, 2);
  a.finalize();
  b.finalize();
  c.finalize();
  CHECK(a.same_counts(b));
  CHECK(!a.same_counts(c));
}
