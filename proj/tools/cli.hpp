#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adlforge::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 ok, 1 stage or validation failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adlforge::cli
