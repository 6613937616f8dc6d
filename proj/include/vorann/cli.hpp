#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vorann::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kVerificationMismatch = 2,
  kIoOrCorruption = 3,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vorann::cli
