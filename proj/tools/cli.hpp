#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcscale::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kInsufficientEvents = 3,
};

/// Runs one `dcscale` invocation. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace dcscale::cli
