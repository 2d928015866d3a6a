#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lumispec::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
};

/// Entry point: `lumispec <spectrum|simulate|sweep|validate> [flags]`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, with argv[0] omitted.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lumispec::cli
