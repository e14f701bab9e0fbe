#include "vgen/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vgen/grammar.hpp"
#include "vgen/parser.hpp"
#include "vgen/scope.hpp"
#include "vgen/types.hpp"

namespace vgen {

namespace {

struct SieveResult {
  CorpusReport report;
  std::vector<Tree> trees;  // parallel to report.accepted
};

std::string position_prefix(int line, int col) {
  std::ostringstream os;
  os << "line " << line << ":" << col << ": ";
  return os.str();
}

SieveResult sieve(const std::vector<CorpusFile>& files, bool semantic) {
  SieveResult out;
  for (const auto& f : files) {
    auto toks = tokenize(f.text);
    if (!toks.ok()) {
      const auto& e = toks.error();
      out.report.rejected.push_back({f.name, position_prefix(e.line, e.col) + e.message});
      continue;
    }
    int token_count = static_cast<int>(toks.value().size());
    auto parsed = parse_tokens(toks.value());
    if (!parsed.ok()) {
      const auto& e = parsed.error();
      out.report.rejected.push_back({f.name, position_prefix(e.line, e.col) + e.message});
      continue;
    }
    Tree tree = std::move(parsed).value();
    if (semantic) {
      ScopeCheck sc = check_scopes(tree);
      if (!sc.ok()) {
        const auto& v = sc.violations.front();
        out.report.rejected.push_back({f.name, position_prefix(v.line, v.col) + v.message});
        continue;
      }
      auto typed = infer(std::move(*sc.design), TypeFactMode::ConcreteDefaults);
      if (!typed.ok()) {
        const auto& e = typed.error();
        out.report.rejected.push_back({f.name, position_prefix(e.line, e.col) + e.message});
        continue;
      }
    }
    out.report.accepted.push_back(f.name);
    out.report.token_counts.emplace_back(f.name, token_count);
    out.trees.push_back(std::move(tree));
  }
  return out;
}

}  // namespace

CorpusReport curate_corpus(const std::vector<CorpusFile>& files, bool semantic) {
  return sieve(files, semantic).report;
}

ProbabilityTable count_sequences(const std::vector<Tree>& trees, int k) {
  ProbabilityTable table;
  table.set_k(k);
  std::vector<int32_t> history;  // rule ids of ancestors, nearest last
  for (const auto& tree : trees) {
    // Explicit stack walk: (node, children consumed).  A node's own count is
    // keyed by its ancestors' rules only; its rule joins the history that
    // its children see.
    struct Frame {
      int node;
      size_t next_kid;
    };
    std::vector<Frame> stack;
    if (tree.size() == 0) continue;
    stack.push_back({tree.root, 0});
    while (!stack.empty()) {
      Frame& top = stack.back();
      const Node& n = tree.at(top.node);
      if (top.next_kid == 0 && !tree.is_leaf(top.node)) {
        ContextKey ctx = context_key(history, k);
        table.add_count(ctx, tree.lhs_of(top.node), n.rule);
        history.push_back(n.rule);
      }
      if (tree.is_leaf(top.node) || top.next_kid == n.kids.size()) {
        if (!tree.is_leaf(top.node)) history.pop_back();
        stack.pop_back();
        continue;
      }
      int kid = n.kids[top.next_kid++];
      stack.push_back({kid, 0});
    }
  }
  return table;
}

ProbabilityTable build_table(ProbabilityTable counts) {
  counts.finalize();
  return counts;
}

TrainResult train_corpus(const std::vector<CorpusFile>& files, int k, bool semantic) {
  SieveResult sieved = sieve(files, semantic);
  TrainResult result;
  result.report = std::move(sieved.report);
  result.table = build_table(count_sequences(sieved.trees, k));
  return result;
}

std::vector<std::string> select_median_band(
    const std::vector<std::pair<std::string, int>>& token_counts, size_t n) {
  if (token_counts.empty() || n == 0) return {};
  std::vector<int> counts;
  counts.reserve(token_counts.size());
  for (const auto& [name, c] : token_counts) counts.push_back(c);
  std::sort(counts.begin(), counts.end());
  int median = counts[(counts.size() - 1) / 2];

  std::vector<std::pair<std::string, int>> ranked = token_counts;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [median](const auto& a, const auto& b) {
                     long da = std::labs(static_cast<long>(a.second) - median);
                     long db = std::labs(static_cast<long>(b.second) - median);
                     if (da != db) return da < db;
                     if (a.second != b.second) return a.second < b.second;
                     return a.first < b.first;
                   });
  if (n < ranked.size()) ranked.resize(n);
  std::vector<std::string> names;
  names.reserve(ranked.size());
  for (const auto& [name, c] : ranked) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<CorpusFile> load_corpus_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".v") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusFile> files;
  files.reserve(paths.size());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    files.push_back({fs::relative(p, dir).generic_string(), content.str()});
  }
  return files;
}

std::string corpus_report_json(const CorpusReport& report) {
  nlohmann::json j;
  j["accepted"] = report.accepted;
  j["rejected"] = nlohmann::json::array();
  for (const auto& r : report.rejected) {
    j["rejected"].push_back({{"name", r.name}, {"error", r.error}});
  }
  nlohmann::json tc = nlohmann::json::array();
  for (const auto& [name, count] : report.token_counts) {
    tc.push_back({{"name", name}, {"tokens", count}});
  }
  j["token_counts"] = tc;
  return j.dump(2);
}

}  // namespace vgen
