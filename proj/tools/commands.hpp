#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wirebus::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,     // bad flags, config document or input outside the domain
    exit_numerical = 3,  // solver or integrator failure
    exit_check = 4,      // a --check threshold was missed
};

/// Parses `args` (without the program name), runs the subcommand and
/// returns the exit code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wirebus::cli
