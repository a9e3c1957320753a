#pragma once

#include <iosfwd>

namespace twocars::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitAudit = 3;
inline constexpr int kExitUsage = 64;

// Runs one command line. Output goes to `out` unless --out names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twocars::cli
