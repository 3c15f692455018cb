#pragma once

#include <iosfwd>

namespace layoutforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

/// Entry point of the `layoutforge` command. Returns the process exit code:
/// 0 on success, 2 when a layout was produced but is infeasible (or a forge
/// task was not accepted), 1 on usage and runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace layoutforge
