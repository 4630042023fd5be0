#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pinnet {

// Exit codes of the pinnet command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotCertified = 1;   // certify: lambda_max > 0; reproduce: a check failed
inline constexpr int kExitEstimationFailed = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitRuntimeFault = 70;

/// Subcommands: simulate, certify, sweep, reproduce. `args` excludes the
/// program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace pinnet
