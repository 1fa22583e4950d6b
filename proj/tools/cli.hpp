#pragma once

#include <iosfwd>

namespace irlscs::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitNspViolation = 3;

// Entry point of the irlscs tool, with streams injectable for tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace irlscs::cli
