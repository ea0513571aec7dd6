#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dthazard::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitExistence = 2,
  kExitUsage = 64,
  kExitData = 65,
  kExitInternal = 70,
};

// Runs the command line (args excludes the program name). Normal output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dthazard::cli
