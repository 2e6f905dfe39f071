#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehpc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitUsage = 64;

/// Runs the `ehpc` command line with `args` (program name excluded).
/// Tables go to `out` or to the --out file; diagnostics go to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehpc
