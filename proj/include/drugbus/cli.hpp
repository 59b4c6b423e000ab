#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drugbus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one invocation of the `drugbus` command. `args` excludes the program
/// name. Serve subcommands block until SIGINT or SIGTERM.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drugbus::cli
