#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcsentinel::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kMaxIterations = 2,
    kTruncated = 3,
    kIoError = 4,
};

/// Parses arguments (argv[0] is the program name) and runs a subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcsentinel::cli
