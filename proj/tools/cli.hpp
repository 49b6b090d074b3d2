#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stepwise::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsageError = 2, kDataError = 3 };

/// Runs one command; args excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace stepwise::cli
