#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pivm::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kPrecondition = 2,
  kConsistency = 3,
  kPrecision = 4,
};

inline constexpr const char* kSchema = "pivm/1";

/// Runs the command line (args excludes the program name) and returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pivm::cli
