#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psusp::cli {

enum ExitCode : int { ok = 0, check_failed = 2, config_error = 3, capacity_error = 4 };

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psusp::cli
