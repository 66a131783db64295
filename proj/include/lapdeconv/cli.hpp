#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lapdeconv {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitMalformedInput = 2,
  kExitKernelSpec = 3,
  kExitEstimator = 4,
};

/// Entry point of the `lapdeconv` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lapdeconv
