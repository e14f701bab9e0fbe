#include "vgen/diversity.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vgen/parser.hpp"

namespace vgen {

DiversityAccumulator::DiversityAccumulator(int n) : n_(n < 1 ? 1 : n) {
  partial_.n = n_;
}

void DiversityAccumulator::add_tree(const Tree& tree) {
  for (int i = 0; i < tree.size(); ++i) {
    if (!tree.is_leaf(i)) rules_.insert(tree.at(i).rule);
  }
}

void DiversityAccumulator::add_tokens(const std::string& name,
                                      const std::vector<Token>& tokens) {
  std::vector<uint8_t> kinds;
  kinds.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (t.kind == Tok::eof) break;
    kinds.push_back(static_cast<uint8_t>(t.kind));
  }
  const size_t n = static_cast<size_t>(n_);
  for (size_t i = 0; i + n <= kinds.size(); ++i) {
    ngrams_.insert(std::vector<uint8_t>(kinds.begin() + i, kinds.begin() + i + n));
  }
  ++partial_.population;
  partial_.total_tokens += static_cast<int64_t>(kinds.size());
  partial_.per_file_tokens.emplace_back(name, static_cast<int>(kinds.size()));
}

bool DiversityAccumulator::add_text(const std::string& name, const std::string& text) {
  auto tokens = tokenize(text);
  if (!tokens.ok()) {
    partial_.skipped.push_back(name);
    return false;
  }
  auto tree = parse_tokens(tokens.value());
  if (!tree.ok()) {
    partial_.skipped.push_back(name);
    return false;
  }
  add_tree(tree.value());
  add_tokens(name, tokens.value());
  return true;
}

DiversityReport DiversityAccumulator::report() const {
  DiversityReport r = partial_;
  r.unique_productions = unique_productions_count();
  r.unique_ngrams = unique_ngrams();
  return r;
}

int unique_productions(const std::vector<std::string>& texts) {
  DiversityAccumulator acc(1);
  for (size_t i = 0; i < texts.size(); ++i) {
    acc.add_text("text_" + std::to_string(i), texts[i]);
  }
  return acc.unique_productions_count();
}

int64_t ngram_diversity(const std::vector<std::string>& texts, int n) {
  DiversityAccumulator acc(n);
  for (size_t i = 0; i < texts.size(); ++i) {
    acc.add_text("text_" + std::to_string(i), texts[i]);
  }
  return acc.unique_ngrams();
}

Result<int, LexError> token_count(const std::string& text) {
  auto tokens = tokenize(text);
  if (!tokens.ok()) return tokens.error();
  int n = 0;
  for (const Token& t : tokens.value()) {
    if (t.kind == Tok::eof) break;
    ++n;
  }
  return n;
}

DiversityReport scan_directory(const std::string& dir, int n) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".v") {
        paths.push_back(entry.path());
      }
    }
  }
  std::sort(paths.begin(), paths.end());

  DiversityAccumulator acc(n);
  for (const auto& p : paths) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    acc.add_text(p.string(), buf.str());
  }
  return acc.report();
}

std::string diversity_report_json(const DiversityReport& report) {
  nlohmann::json j;
  j["population"] = report.population;
  j["skipped"] = report.skipped;
  j["n"] = report.n;
  j["unique_productions"] = report.unique_productions;
  j["unique_ngrams"] = report.unique_ngrams;
  j["total_tokens"] = report.total_tokens;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, count] : report.per_file_tokens) {
    files.push_back({{"file", name}, {"tokens", count}});
  }
  j["files"] = files;
  return j.dump(2);
}

}  // namespace vgen
