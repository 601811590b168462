#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lathop::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigVersion = 1;

enum ExitCode : int { ok = 0, failed = 1, bad_input = 2 };

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lathop::cli
