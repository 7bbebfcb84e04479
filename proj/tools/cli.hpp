#pragma once

#include <ostream>

namespace rluroth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCap = 3;

/// Parses argv and runs one subcommand. Results go to `out` (or --out),
/// one-line diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rluroth::cli
