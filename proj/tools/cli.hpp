#pragma once

#include <ostream>

namespace midal::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage or precondition failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `midal` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace midal::cli
