#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgmhd::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kIoError = 2, kUsage = 64 };

/// Runs one command line (args[0] is the program name). Writes exactly one
/// JSON document to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgmhd::cli
