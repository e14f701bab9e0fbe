// vgen: train a production table from a Verilog corpus, sample designs from
// it, and drive fuzzing campaigns against external tools.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vgen/campaign.hpp"
#include "vgen/diversity.hpp"
#include "vgen/inject.hpp"
#include "vgen/parser.hpp"
#include "vgen/pipeline.hpp"
#include "vgen/trainer.hpp"

namespace {

using namespace vgen;

std::string read_file_or_exit(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(2);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string loc(int line, int col) {
  return "line " + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

// Full strict validation: re-lex, re-parse, scope check, type check with
// checker defaults.  Empty result means the text is valid.
std::vector<std::string> strict_diagnostics(const std::string& text) {
  std::vector<std::string> out;
  auto toks = tokenize(text);
  if (!toks.ok()) {
    out.push_back(loc(toks.error().line, toks.error().col) + toks.error().message);
    return out;
  }
  auto tree = parse_tokens(toks.value());
  if (!tree.ok()) {
    out.push_back(loc(tree.error().line, tree.error().col) + tree.error().message);
    return out;
  }
  ScopeCheck sc = check_scopes(tree.value());
  if (!sc.ok()) {
    for (const auto& v : sc.violations) out.push_back(loc(v.line, v.col) + v.message);
    return out;
  }
  auto typed = infer(std::move(*sc.design), TypeFactMode::ConcreteDefaults);
  if (!typed.ok()) {
    out.push_back(loc(typed.error().line, typed.error().col) + typed.error().message);
  }
  return out;
}

ProbabilityTable load_table_or_exit(const std::string& path, int k) {
  try {
    ProbabilityTable table = load_table_file(path);
    if (k >= 0 && k != table.k()) {
      if (k > table.k()) {
        std::cerr << "error: --k " << k << " exceeds the table's context depth "
                  << table.k() << "\n";
        std::exit(2);
      }
      table = table.reduced(k);
    }
    return table;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(2);
  }
}

int cmd_train(const std::string& corpus, int k, const std::string& out) {
  auto files = load_corpus_dir(corpus);
  if (files.empty()) {
    std::cerr << "error: no .v files under " << corpus << "\n";
    return 2;
  }
  TrainResult result = train_corpus(files, k);
  if (result.report.accepted.empty()) {
    std::cerr << "error: every corpus file was rejected\n";
    std::cout << corpus_report_json(result.report) << "\n";
    return 1;
  }
  try {
    save_table_file(result.table, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << corpus_report_json(result.report) << "\n";
  return 0;
}

int cmd_skeleton(const std::string& table_path, uint64_t seed, double tau) {
  ProbabilityTable table = load_table_or_exit(table_path, -1);
  auto skel = generate_skeleton(table, seed, GenLimits{}, tau);
  if (!skel.ok()) {
    std::cerr << "error: " << skel.error().message << "\n";
    return 1;
  }
  std::cout << print_tree_annotated(skel.value().tree);
  return 0;
}

int cmd_generate(const std::string& table_path, uint64_t seed, int count, int min_tokens,
                 double tau, int k, const std::string& out_dir) {
  namespace fs = std::filesystem;
  ProbabilityTable table = load_table_or_exit(table_path, k);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << "\n";
    return 2;
  }

  InjectionConfig cfg;
  cfg.token_budget = min_tokens;
  cfg.atom.tau = tau;
  cfg.gate_probability = gate_probability_from(table);

  std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
  if (!manifest) {
    std::cerr << "error: cannot write manifest under " << out_dir << "\n";
    return 2;
  }

  int failures = 0;
  uint64_t s = seed;
  for (int i = 0; i < count; ++i) {
    uint64_t slot_seed = s;
    s = next_seed(s);

    bool done = false;
    uint64_t attempt_seed = slot_seed;
    for (int attempt = 0; attempt < 20 && !done; ++attempt) {
      auto g = grow_design(table, attempt_seed, cfg);
      if (!g.ok()) {
        attempt_seed = mix64(attempt_seed ^ 0x6b79c0ffee5eedULL);
        if (attempt == 19) {
          manifest << slot_seed << " 0 failed " << g.error().stats.iterations << "\n";
          std::cerr << "warning: seed " << slot_seed << ": " << g.error().reason << "\n";
          ++failures;
        }
        continue;
      }
      std::string text = print_tree(g.value().typed.design.tree);
      fs::path file = fs::path(out_dir) / ("design_" + std::to_string(slot_seed) + ".v");
      std::ofstream out(file);
      if (!out) {
        std::cerr << "error: cannot write " << file.string() << "\n";
        return 2;
      }
      out << text;
      bool valid = strict_diagnostics(text).empty();
      manifest << slot_seed << " " << g.value().typed.design.tree.leaf_count() << " "
               << (valid ? "valid" : "invalid") << " " << g.value().stats.iterations
               << "\n";
      done = true;
    }
  }
  return failures == count ? 1 : 0;
}

int cmd_check(const std::string& file) {
  std::string text = read_file_or_exit(file);
  std::vector<std::string> diags = strict_diagnostics(text);
  if (diags.empty()) {
    std::cout << file << ": ok\n";
    return 0;
  }
  for (const auto& d : diags) std::cout << file << ": " << d << "\n";
  return 1;
}

int cmd_diversity(const std::string& dir, int n) {
  DiversityReport report = scan_directory(dir, n);
  std::cout << diversity_report_json(report) << "\n";
  return 0;
}

int cmd_campaign(const std::string& config_path) {
  auto cfg = load_campaign_config(config_path);
  if (!cfg.ok()) {
    std::cerr << "error: " << cfg.error() << "\n";
    return 2;
  }
  auto result = run_campaign(cfg.value());
  if (!result.ok()) {
    std::cerr << "error: " << result.error() << "\n";
    return 2;
  }
  CampaignSummary sum = summarize(read_file_or_exit(result.value().manifest_path));
  std::cout << "designs: " << result.value().outcomes.size() << "\n";
  for (const auto& [cls, n] : sum.by_class) std::cout << cls << ": " << n << "\n";
  std::cout << "manifest: " << result.value().manifest_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bottom-up Verilog design fuzzer"};
  app.require_subcommand(1);

  std::string corpus, table, out, out_dir, file, dir, config;
  uint64_t seed = 1;
  int k = 1;
  int gen_k = -1;
  int count = 1;
  int min_tokens = 150;
  int n = 4;
  double tau = 1.0;

  CLI::App* train = app.add_subcommand("train", "fit a production table to a corpus");
  train->add_option("--corpus", corpus, "directory of .v files")->required();
  train->add_option("--k", k, "context depth")->check(CLI::Range(0, kMaxContextDepth));
  train->add_option("--out", out, "table output path")->required();

  CLI::App* skeleton = app.add_subcommand("skeleton", "sample one raw skeleton");
  skeleton->add_option("--table", table, "trained table")->required();
  skeleton->add_option("--seed", seed, "random seed");
  skeleton->add_option("--tau", tau, "sampling temperature")
      ->check(CLI::PositiveNumber);

  CLI::App* generate = app.add_subcommand("generate", "grow full designs to a token budget");
  generate->add_option("--table", table, "trained table")->required();
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--count", count, "number of designs")->check(CLI::PositiveNumber);
  generate->add_option("--min-tokens", min_tokens, "token budget per design")
      ->check(CLI::PositiveNumber);
  generate->add_option("--tau", tau, "sampling temperature")->check(CLI::PositiveNumber);
  generate->add_option("--k", gen_k, "re-aggregate the table to this context depth")
      ->check(CLI::Range(0, kMaxContextDepth));
  generate->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* check = app.add_subcommand("check", "validate one design file");
  check->add_option("--file", file, "design to check")->required();

  CLI::App* diversity = app.add_subcommand("diversity", "measure a design population");
  diversity->add_option("--dir", dir, "directory of .v files")->required();
  diversity->add_option("--n", n, "n-gram window")->check(CLI::PositiveNumber);

  CLI::App* campaign = app.add_subcommand("campaign", "run a tool over generated designs");
  campaign->add_option("--config", config, "key=value campaign config")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return cmd_train(corpus, k, out);
  if (skeleton->parsed()) return cmd_skeleton(table, seed, tau);
  if (generate->parsed()) {
    return cmd_generate(table, seed, count, min_tokens, tau, gen_k, out_dir);
  }
  if (check->parsed()) return cmd_check(file);
  if (diversity->parsed()) return cmd_diversity(dir, n);
  if (campaign->parsed()) return cmd_campaign(config);
  return 2;
}
