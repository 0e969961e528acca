#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fincli {

enum ExitCode : int {
  kSuccess = 0,
  kNumericalFailure = 1,  ///< solver/optimizer failure or a failed optimality check
  kUsageError = 2,        ///< bad flags, invalid configuration, unreadable input
};

/// Runs one CLI invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fincli
