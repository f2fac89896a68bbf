#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relaxkit {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,        // invalid flags, malformed input
  kExitNumeric = 3,      // numeric failure during evaluation
  kExitNoConvergence = 4,
  kExitVerifyFailed = 5,
};

// args excludes the program name. Tables go to `out` unless --output names a
// file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace relaxkit
