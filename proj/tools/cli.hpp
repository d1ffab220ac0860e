#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spdc::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kIo = 3,
  kComputation = 4,
};

/// Runs one CLI invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spdc::cli
