#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tonestack::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kInputError = 1,
    kNumericalFailure = 2,
    kComparisonFailure = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tonestack::cli
