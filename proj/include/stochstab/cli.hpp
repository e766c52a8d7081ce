#pragma once

#include <ostream>

namespace stochstab {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitCap = 3;
inline constexpr int kExitInconsistent = 4;
inline constexpr int kExitDisagree = 5;

/// Runs one command (analyze, simulate, verify, instance, report). Results go
/// to `out` (or the --out file), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stochstab
