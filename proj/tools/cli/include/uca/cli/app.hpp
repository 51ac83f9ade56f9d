#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uca::cli {

/// Process exit statuses shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitThreshold = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit status. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace uca::cli
