#pragma once

#include <iosfwd>

namespace tucker {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitSolver = 4,
  kExitHypothesis = 5,
};

/// Entry point of the tucker_cli tool: subcommands decompose, bench, bound
/// and gen. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tucker
