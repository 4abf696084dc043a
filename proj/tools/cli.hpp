#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

/// Runs the command line `args` (program name excluded). Reports go to the
/// output directory; a short summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsfp::cli
