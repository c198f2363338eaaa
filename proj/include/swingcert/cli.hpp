#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swingcert::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNotCertified = 1,
  kUsageError = 2,
  kNumericalFailure = 3,
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swingcert::cli
