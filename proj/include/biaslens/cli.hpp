#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biaslens {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,
    kExitPartial = 2,
};

/// Runs the biaslens command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biaslens
