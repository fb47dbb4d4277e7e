#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diffcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `diffcal` command. `args` excludes the program name. Errors are
/// printed to `err` as a single `error[<code>]: <message>` line.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace diffcal::cli
