#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexfair::cli {

inline constexpr const char* kVersion = "lexfair 0.1.0";

/// Exit codes of every subcommand.
enum Exit : int { kOk = 0, kFails = 1, kUsage = 2, kBudget = 3 };

/// Runs one command line (args[0] is the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lexfair::cli
