#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vgen/result.hpp"

namespace vgen {

struct CampaignConfig {
  std::string table;           // trained-table path
  int k = -1;                  // context depth; -1 keeps the table's own
  double tau = 1.0;
  int count = 1;
  int min_tokens = 150;
  uint64_t seed = 1;
  std::string tool;            // command template; {file} expands per design
  double timeout_s = 10.0;
  std::string out_dir = "campaign_out";
  int workers = 1;
  std::string assert_pattern;  // output substring marking a failed assertion
};

// Flat key=value text, one pair per line, '#' comments.  Unknown keys and
// malformed values are errors; so are out-of-range settings (count < 1,
// timeout <= 0, missing table/tool).
Result<CampaignConfig, std::string> parse_campaign_config(const std::string& text);
Result<CampaignConfig, std::string> load_campaign_config(const std::string& path);

struct Outcome {
  int id = 0;
  uint64_t seed = 0;
  std::string cls;     // clean | reject | crash | timeout
  std::string detail;  // exit=N | signal=N | assert | timeout | generation
  int64_t millis = 0;
};

struct CampaignResult {
  std::vector<Outcome> outcomes;  // slot order (design id), not finish order
  std::string manifest_path;
};

// Generates the design population deterministically (seed chain), writes
// every .v file, then runs the tool over them with up to `workers`
// concurrent subprocesses.  The manifest is append-only and flushed per
// record, so a killed campaign leaves a readable prefix.  Per-design tool
// failures are outcomes; only configuration/setup problems return errors.
Result<CampaignResult, std::string> run_campaign(const CampaignConfig& cfg);

struct CampaignSummary {
  int total = 0;
  std::map<std::string, int> by_class;
  // (context depth, class) -> count; depth -1 for records preceding any
  // header line.  Concatenated manifests from several campaigns aggregate.
  std::map<std::pair<int, std::string>, int> by_k_class;
};

CampaignSummary summarize(const std::string& manifest_text);

}  // namespace vgen
