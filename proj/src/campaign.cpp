#include "vgen/campaign.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vgen/inject.hpp"
#include "vgen/subprocess.hpp"

namespace vgen {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Result<CampaignConfig, std::string> parse_campaign_config(const std::string& text) {
  CampaignConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      return "line " + std::to_string(lineno) + ": expected key=value";
    }
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "table") {
        cfg.table = val;
      } else if (key == "k") {
        cfg.k = std::stoi(val);
      } else if (key == "tau") {
        cfg.tau = std::stod(val);
      } else if (key == "count") {
        cfg.count = std::stoi(val);
      } else if (key == "min_tokens") {
        cfg.min_tokens = std::stoi(val);
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key == "tool") {
        cfg.tool = val;
      } else if (key == "timeout_s") {
        cfg.timeout_s = std::stod(val);
      } else if (key == "out_dir") {
        cfg.out_dir = val;
      } else if (key == "workers") {
        cfg.workers = std::stoi(val);
      } else if (key == "assert_pattern") {
        cfg.assert_pattern = val;
      } else {
        return "line " + std::to_string(lineno) + ": unknown key '" + key + "'";
      }
    } catch (const std::exception&) {
      return "line " + std::to_string(lineno) + ": bad value for '" + key + "'";
    }
  }
  if (cfg.table.empty()) return std::string("missing required key 'table'");
  if (cfg.tool.empty()) return std::string("missing required key 'tool'");
  if (cfg.count < 1) return std::string("count must be at least 1");
  if (cfg.timeout_s <= 0) return std::string("timeout_s must be positive");
  if (cfg.workers < 1) return std::string("workers must be at least 1");
  if (cfg.min_tokens < 1) return std::string("min_tokens must be at least 1");
  return cfg;
}

Result<CampaignConfig, std::string> load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) return "cannot open config file: " + path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_campaign_config(buf.str());
}

namespace {

std::string expand_tool(const std::string& tmpl, const std::string& file) {
  std::string out = tmpl;
  const std::string ph = "{file}";
  size_t pos = 0;
  while ((pos = out.find(ph, pos)) != std::string::npos) {
    out.replace(pos, ph.size(), file);
    pos += file.size();
  }
  return out;
}

void classify(const RunResult& r, const std::string& assert_pattern, Outcome& o) {
  o.millis = r.millis;
  if (r.timed_out) {
    o.cls = "timeout";
    o.detail = "timeout";
  } else if (r.term_signal > 0) {
    o.cls = "crash";
    o.detail = "signal=" + std::to_string(r.term_signal);
  } else if (!assert_pattern.empty() && r.output.find(assert_pattern) != std::string::npos) {
    o.cls = "crash";
    o.detail = "assert";
  } else if (r.exit_code == 0) {
    o.cls = "clean";
    o.detail = "exit=0";
  } else {
    o.cls = "reject";
    o.detail = "exit=" + std::to_string(r.exit_code);
  }
}

std::string manifest_line(const Outcome& o) {
  return std::to_string(o.id) + " " + std::to_string(o.seed) + " " + o.cls + " " +
         o.detail + " " + std::to_string(o.millis) + "\n";
}

}  // namespace

Result<CampaignResult, std::string> run_campaign(const CampaignConfig& cfg) {
  namespace fs = std::filesystem;

  ProbabilityTable table;
  try {
    table = load_table_file(cfg.table);
    if (cfg.k >= 0 && cfg.k != table.k()) {
      if (cfg.k > table.k()) {
        return "k=" + std::to_string(cfg.k) + " exceeds the table's depth " +
               std::to_string(table.k());
      }
      table = table.reduced(cfg.k);
    }
  } catch (const std::exception& e) {
    return std::string("table: ") + e.what();
  }

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) return "cannot create output directory: " + cfg.out_dir;

  InjectionConfig icfg;
  icfg.token_budget = cfg.min_tokens;
  icfg.atom.tau = cfg.tau;
  icfg.gate_probability = gate_probability_from(table);

  // Generation is serial and fully determined by (seed, count): the tool
  // subprocesses may race, the designs never do.
  struct Slot {
    uint64_t seed = 0;
    std::string path;
    bool generated = false;
  };
  std::vector<Slot> slots(cfg.count);
  uint64_t s = cfg.seed;
  for (int i = 0; i < cfg.count; ++i) {
    slots[i].seed = s;
    uint64_t attempt_seed = s;
    for (int attempt = 0; attempt < 20 && !slots[i].generated; ++attempt) {
      auto g = grow_design(table, attempt_seed, icfg);
      if (g.ok()) {
        slots[i].path =
            (fs::path(cfg.out_dir) / ("design_" + std::to_string(i) + ".v")).string();
        std::ofstream out(slots[i].path);
        if (!out) return "cannot write design file: " + slots[i].path;
        out << print_tree(g.value().typed.design.tree);
        slots[i].generated = true;
      } else {
        attempt_seed = mix64(attempt_seed ^ 0x6b79c0ffee5eedULL);
      }
    }
    s = next_seed(s);
  }

  CampaignResult result;
  result.manifest_path = (fs::path(cfg.out_dir) / "manifest.txt").string();
  std::ofstream manifest(result.manifest_path, std::ios::app);
  if (!manifest) return "cannot open manifest: " + result.manifest_path;
  manifest << "# campaign k=" << table.k() << " tau=" << cfg.tau
           << " count=" << cfg.count << " seed=" << cfg.seed << "\n";
  manifest.flush();

  result.outcomes.resize(cfg.count);
  std::atomic<int> next{0};
  std::mutex manifest_mu;

  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= cfg.count) return;
      Outcome o;
      o.id = i;
      o.seed = slots[i].seed;
      if (!slots[i].generated) {
        o.cls = "reject";
        o.detail = "generation";
      } else {
        RunResult r = run_command(expand_tool(cfg.tool, slots[i].path), cfg.timeout_s);
        classify(r, cfg.assert_pattern, o);
      }
      {
        std::lock_guard<std::mutex> lock(manifest_mu);
        manifest << manifest_line(o);
        manifest.flush();
        result.outcomes[i] = o;
      }
    }
  };

  int n_workers = cfg.workers < cfg.count ? cfg.workers : cfg.count;
  std::vector<std::thread> threads;
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  return result;
}

CampaignSummary summarize(const std::string& manifest_text) {
  CampaignSummary sum;
  std::istringstream in(manifest_text);
  std::string line;
  int current_k = -1;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      size_t kp = t.find("k=");
      if (kp != std::string::npos) {
        try {
          current_k = std::stoi(t.substr(kp + 2));
        } catch (const std::exception&) {
        }
      }
      continue;
    }
    std::istringstream rec(t);
    long long id;
    unsigned long long seed;
    std::string cls, detail;
    long long millis;
    if (!(rec >> id >> seed >> cls >> detail >> millis)) continue;
    ++sum.total;
    ++sum.by_class[cls];
    ++sum.by_k_class[{current_k, cls}];
  }
  return sum;
}

}  // namespace vgen
