#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plabs {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInvalidInput = 2,
    kExitNotConverged = 3,
    kExitCapability = 4,
};

/// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace plabs
