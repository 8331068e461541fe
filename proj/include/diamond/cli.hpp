#pragma once

#include <iosfwd>

namespace diamond::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `diamond` subcommand. Report records go to `out` as JSON lines,
/// the human summary and usage errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diamond::cli
