#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (without the program name). Artifacts go to `out`
// unless --output names a file; diagnostics and progress go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmse
