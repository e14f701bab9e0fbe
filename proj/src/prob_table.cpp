#include "vgen/prob_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vgen {

ContextKey ctx_push(const ContextKey& ctx, int rule, int k) {
  ContextKey out;
  if (k <= 0) return out;
  int keep = std::min<int>(ctx.len, k - 1);
  // Keep the most recent `keep` entries, then append.
  int start = ctx.len - keep;
  for (int i = 0; i < keep; ++i) out.ids[i] = ctx.ids[start + i];
  out.ids[keep] = rule;
  out.len = static_cast<uint8_t>(keep + 1);
  return out;
}

ContextKey context_key(const std::vector<int>& history, int k) {
  ContextKey out;
  int take = std::min<int>(k, static_cast<int>(history.size()));
  int start = static_cast<int>(history.size()) - take;
  for (int i = 0; i < take; ++i) out.ids[i] = history[start + i];
  out.len = static_cast<uint8_t>(take);
  return out;
}

ContextKey ctx_drop_oldest(const ContextKey& ctx) {
  ContextKey out;
  if (ctx.len == 0) return out;
  out.len = static_cast<uint8_t>(ctx.len - 1);
  for (int i = 0; i < out.len; ++i) out.ids[i] = ctx.ids[i + 1];
  return out;
}

std::string ctx_to_string(const ContextKey& ctx) {
  std::string s = "[";
  for (int i = 0; i < ctx.len; ++i) {
    if (i) s += ",";
    s += std::to_string(ctx.ids[i]);
  }
  s += "]";
  return s;
}

Distribution apply_temperature(const Distribution& dist, double tau) {
  if (tau <= 0) throw std::invalid_argument("temperature must be positive");
  if (tau == 1.0) return dist;
  Distribution out;
  out.outcomes.reserve(dist.outcomes.size());
  double sum = 0;
  for (const auto& [rule, p] : dist.outcomes) {
    double q = std::pow(p, 1.0 / tau);
    out.outcomes.emplace_back(rule, q);
    sum += q;
  }
  for (auto& [rule, q] : out.outcomes) q /= sum;
  return out;
}

int sample_distribution(const Distribution& dist, double u) {
  double acc = 0;
  for (const auto& [rule, p] : dist.outcomes) {
    acc += p;
    if (u < acc) return rule;
  }
  // Guard against accumulated rounding at u ~ 1.
  return dist.outcomes.back().first;
}

void ProbabilityTable::add_count(const ContextKey& ctx, NT nt, int rule, uint64_t n) {
  finalized_ = false;
  Row& row = entries_[Key{static_cast<int32_t>(nt), ctx}];
  row.derived = false;
  auto it = std::lower_bound(row.counts.begin(), row.counts.end(), rule,
                             [](const auto& a, int r) { return a.first < r; });
  if (it != row.counts.end() && it->first == rule)
    it->second += n;
  else
    row.counts.insert(it, {rule, n});
  row.total += n;
}

void ProbabilityTable::finalize() {
  const Grammar& g = Grammar::get();
  if (k_ < 0 || k_ > kMaxContextDepth) throw TableError("context depth out of range");

  // Drop any previously derived rows so finalize is idempotent.
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.derived)
      it = entries_.erase(it);
    else
      ++it;
  }

  for (const auto& [key, row] : entries_) {
    if (row.total == 0) throw TableError("empty count row");
    for (const auto& [rule, count] : row.counts) {
      if (count == 0) throw TableError("zero count entry");
      if (rule < 0 || rule >= g.rule_count() ||
          g.rule(rule).lhs != static_cast<NT>(key.first))
        throw TableError("rule id does not produce the row's nonterminal");
      if (key.second.len > k_) throw TableError("context longer than table depth");
    }
  }

  // Marginal per nonterminal over every observed context.
  std::vector<std::map<int32_t, uint64_t>> marginal(kNTCount);
  for (const auto& [key, row] : entries_)
    for (const auto& [rule, count] : row.counts) marginal[key.first][rule] += count;

  ContextKey empty;
  for (int nt = 0; nt < kNTCount; ++nt) {
    Key key{nt, empty};
    if (entries_.count(key)) continue;  // observed empty row stays as trained
    Row row;
    row.derived = true;
    if (marginal[nt].empty()) {
      // Never seen in the corpus: uniform over the grammar's alternatives.
      for (int rule : g.rules_for(static_cast<NT>(nt))) {
        row.counts.emplace_back(rule, 1);
        row.total += 1;
      }
    } else {
      for (const auto& [rule, count] : marginal[nt]) {
        row.counts.emplace_back(rule, count);
        row.total += count;
      }
    }
    entries_.emplace(std::move(key), std::move(row));
  }
  finalized_ = true;
}

const ProbabilityTable::Row* ProbabilityTable::find_row(const ContextKey& ctx, NT nt) const {
  auto it = entries_.find(Key{static_cast<int32_t>(nt), ctx});
  return it == entries_.end() ? nullptr : &it->second;
}

Distribution ProbabilityTable::lookup_distribution(const ContextKey& ctx, NT nt) const {
  ContextKey cur = ctx;
  for (;;) {
    if (const Row* row = find_row(cur, nt)) {
      Distribution d;
      d.outcomes.reserve(row->counts.size());
      for (const auto& [rule, count] : row->counts)
        d.outcomes.emplace_back(rule, static_cast<double>(count) / static_cast<double>(row->total));
      return d;
    }
    if (cur.len == 0) break;
    cur = ctx_drop_oldest(cur);
  }
  throw TableError(std::string("no distribution for nonterminal ") + nt_name(nt) +
                   " (table not finalized?)");
}

std::map<ProbabilityTable::Key, ProbabilityTable::Row> ProbabilityTable::observed_rows() const {
  std::map<Key, Row> out;
  for (const auto& [key, row] : entries_)
    if (!row.derived) out.emplace(key, row);
  return out;
}

ProbabilityTable ProbabilityTable::reduced(int k) const {
  if (k > k_) throw TableError("cannot widen a table's context depth");
  ProbabilityTable out(k);
  for (const auto& [key, row] : entries_) {
    if (row.derived) continue;
    ContextKey cut = key.second;
    while (cut.len > k) cut = ctx_drop_oldest(cut);
    for (const auto& [rule, count] : row.counts)
      out.add_count(cut, static_cast<NT>(key.first), rule, count);
  }
  out.finalize();
  return out;
}

bool ProbabilityTable::same_counts(const ProbabilityTable& o) const {
  return k_ == o.k_ && observed_rows() == o.observed_rows();
}

std::string serialize_table(const ProbabilityTable& table) {
  std::string out;
  out += "grammar_version: " + Grammar::get().version() + "\n";
  out += "k: " + std::to_string(table.k()) + "\n";
  for (const auto& [key, row] : table.observed_rows()) {
    out += "\n";
    out += "context: " + ctx_to_string(key.second) + "\n";
    out += std::string("nonterminal: ") + nt_name(static_cast<NT>(key.first)) + "\n";
    for (const auto& [rule, count] : row.counts)
      out += "rule " + std::to_string(rule) + ": " + std::to_string(count) + "\n";
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& why) {
  throw TableError("table line " + std::to_string(line_no) + ": " + why);
}

// Parses "[1,2,3]" (or "[]").
ContextKey parse_ctx(const std::string& s, int line_no) {
  ContextKey ctx;
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    parse_fail(line_no, "context must look like [id,id,...]");
  std::string body = s.substr(1, s.size() - 2);
  if (body.empty()) return ctx;
  std::stringstream ss(body);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (ctx.len >= kMaxContextDepth) parse_fail(line_no, "context longer than the supported depth");
    try {
      size_t used = 0;
      int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument("");
      ctx.ids[ctx.len++] = v;
    } catch (const std::exception&) {
      parse_fail(line_no, "bad rule id '" + part + "' in context");
    }
  }
  return ctx;
}

}  // namespace

ProbabilityTable deserialize_table(const std::string& text) {
  ProbabilityTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  bool saw_version = false, saw_k = false;
  bool have_ctx = false, have_nt = false;
  ContextKey ctx;
  NT nt = NT::Source;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      // Record separator; the next record starts fresh.
      have_ctx = have_nt = false;
      continue;
    }
    auto colon = line.find(": ");
    if (colon == std::string::npos) parse_fail(line_no, "expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 2);

    if (key == "grammar_version") {
      if (value != Grammar::get().version())
        parse_fail(line_no, "grammar version '" + value + "' does not match this build");
      saw_version = true;
    } else if (key == "k") {
      try {
        int k = std::stoi(value);
        if (k < 0 || k > kMaxContextDepth) parse_fail(line_no, "k out of range");
        table.set_k(k);
      } catch (const TableError&) {
        throw;
      } catch (const std::exception&) {
        parse_fail(line_no, "bad k value '" + value + "'");
      }
      saw_k = true;
    } else if (key == "context") {
      ctx = parse_ctx(value, line_no);
      have_ctx = true;
      have_nt = false;
    } else if (key == "nonterminal") {
      if (!have_ctx) parse_fail(line_no, "nonterminal before context");
      if (!nt_from_name(value, nt)) parse_fail(line_no, "unknown nonterminal '" + value + "'");
      have_nt = true;
    } else if (key.rfind("rule ", 0) == 0) {
      if (!have_nt) parse_fail(line_no, "rule line outside a record");
      int rule = 0;
      uint64_t count = 0;
      try {
        rule = std::stoi(key.substr(5));
        count = std::stoull(value);
      } catch (const std::exception&) {
        parse_fail(line_no, "bad rule line");
      }
      if (count == 0) parse_fail(line_no, "zero count");
      table.add_count(ctx, nt, rule, count);
    } else {
      parse_fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw TableError("missing grammar_version header");
  if (!saw_k) throw TableError("missing k header");
  table.finalize();
  return table;
}

ProbabilityTable load_table_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw TableError("cannot open table file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize_table(ss.str());
}

void save_table_file(const ProbabilityTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw TableError("cannot write table file: " + path);
  f << serialize_table(table);
}

}  // namespace vgen
