// Times the parallel kernels against their serial references and verifies
// they produce identical output while doing so.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vgen/parallel.hpp"
#include "vgen/parser.hpp"
#include "vgen/trainer.hpp"

namespace {

using namespace vgen;

const char* kCorpus[] = {
    "module m0 ( input a , input b , output wire y ) ;\n"
    "wire t ;\n"
    "assign t = a & b ;\n"
    "assign y = t | a ;\n"
    "endmodule\n",

    "module m1 ( input wire [7:0] d , output reg [7:0] q ) ;\n"
    "reg [7:0] hold ;\n"
    "always @ ( * ) begin\n"
    "hold = d ;\n"
    "q = hold ;\n"
    "end\n"
    "endmodule\n",

    "module m2 ( input clk , input [3:0] n , output reg [3:0] c ) ;\n"
    "wire [4:0] wide ;\n"
    "assign wide = n + c ;\n"
    "always @ ( posedge clk ) begin\n"
    "if ( n == 4'd0 ) c <= 4'd1 ;\n"
    "else c <= n ;\n"
    "end\n"
    "endmodule\n",
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return ms_since(t0);
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool equal) {
  std::cout << name << ": serial " << serial_ms << " ms, parallel " << parallel_ms
            << " ms, speedup " << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0)
            << "x, outputs " << (equal ? "identical" : "DIFFER") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial-vs-parallel kernel benchmark"};
  int atoms = 400;
  int grown = 24;
  int copies = 200;
  app.add_option("--atoms", atoms, "population size for the atom kernel");
  app.add_option("--grown", grown, "population size for the growth kernel");
  app.add_option("--copies", copies, "tree multiplier for the counting kernel");
  CLI11_PARSE(app, argc, argv);

  std::vector<CorpusFile> files;
  for (size_t i = 0; i < std::size(kCorpus); ++i) {
    files.push_back({"bench_" + std::to_string(i) + ".v", kCorpus[i]});
  }
  TrainResult trained = train_corpus(files, 2);
  std::cout << "threads: " << thread_count() << "\n";
#ifndef _OPENMP
  std::cout << "(built without OpenMP; the parallel path is the serial loop)\n";
#endif

  PipelineOptions strict;
  strict.strict = true;
  std::vector<PopulationItem> a, b;
  double s1 = timed([&] {
    a = generate_population(trained.table, 42, atoms, strict, ExecMode::Serial);
  });
  double p1 = timed([&] {
    b = generate_population(trained.table, 42, atoms, strict, ExecMode::Parallel);
  });
  bool eq1 = a.size() == b.size();
  for (size_t i = 0; eq1 && i < a.size(); ++i) {
    eq1 = a[i].ok == b[i].ok && a[i].text == b[i].text && a[i].seed == b[i].seed;
  }
  report("atom population", s1, p1, eq1);

  InjectionConfig icfg;
  icfg.token_budget = 150;
  std::vector<PopulationItem> c, d;
  double s2 = timed([&] {
    c = grow_population(trained.table, 7, grown, icfg, ExecMode::Serial);
  });
  double p2 = timed([&] {
    d = grow_population(trained.table, 7, grown, icfg, ExecMode::Parallel);
  });
  bool eq2 = c.size() == d.size();
  for (size_t i = 0; eq2 && i < c.size(); ++i) {
    eq2 = c[i].ok == d[i].ok && c[i].text == d[i].text;
  }
  report("grown population", s2, p2, eq2);

  std::vector<Tree> trees;
  for (int r = 0; r < copies; ++r) {
    for (const char* text : kCorpus) {
      auto t = parse_design(text);
      if (t.ok()) trees.push_back(std::move(t.value()));
    }
  }
  ProbabilityTable t1, t2;
  double s3 = timed([&] { t1 = count_sequences_sharded(trees, 4, ExecMode::Serial); });
  double p3 = timed([&] { t2 = count_sequences_sharded(trees, 4, ExecMode::Parallel); });
  report("context counting", s3, p3, t1.same_counts(t2));

  return 0;
}
