#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqconv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one command line (program name excluded). Artifacts go to --out
/// files or to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqconv
