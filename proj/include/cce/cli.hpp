#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cce {

/// Exit codes of the `cce` tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Runs the command line with args[0] as the program name. Query text is read
/// from `in` when none is given on the command line.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cce
