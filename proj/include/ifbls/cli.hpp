#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifbls::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line in-process. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifbls::cli
