#pragma once

#include <iosfwd>

namespace cointsearch {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Entry point of the `cointsearch` tool: subcommands unitroot, search, johansen, forecast
/// and compare. Reports go to `out` (or --output), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cointsearch
