#pragma once

#include <cstdint>
#include <string>

namespace vgen {

// Outcome of one tool invocation.  Exactly one of these holds: timed_out,
// term_signal > 0 (killed by that signal), or a normal exit with exit_code.
struct RunResult {
  bool timed_out = false;
  int term_signal = 0;
  int exit_code = 0;
  std::string output;  // combined stdout+stderr, truncated at the cap
  int64_t millis = 0;
};

// Runs `command` under /bin/sh in its own process group, captures combined
// output, and kills the whole group if the wall-clock deadline passes.  A
// hanging or crashing command is an ordinary result, never an exception;
// only fork/pipe resource failures throw.
RunResult run_command(const std::string& command, double timeout_seconds,
                      size_t max_output_bytes = 1 << 20);

}  // namespace vgen
