#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace islopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitSolver = 4;

// Runs one invocation; args excludes the program name. Normal output goes to
// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace islopt::cli
