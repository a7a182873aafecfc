#pragma once

#include <ostream>

namespace dlqg {

// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // numerical failure (line-search stall, indefinite solve)
  kExitInput = 2,    // invalid input or usage
  kExitNotConverged = 3,
  kExitSimulationMismatch = 4,
};

// Entry point of the `dlqg` tool; reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlqg
