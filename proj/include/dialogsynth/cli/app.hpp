#pragma once

#include <ostream>
#include <stop_token>

namespace dialogsynth::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_backend = 3,
  exit_interrupted = 130,
};

/// Entry point of the `dialogsynth` tool. Reports go to `out`, diagnostics
/// to `err`. A stop request drains in-flight records of `generate` and
/// leaves a resume marker next to the output.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::stop_token stop = {});

}  // namespace dialogsynth::cli
