#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relgrow::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNoFitConverged = 3,
  kUsage = 64,
};

int run(int argc, char** argv);
/// Same as the command line entry point, with explicit streams; args exclude
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relgrow::cli
