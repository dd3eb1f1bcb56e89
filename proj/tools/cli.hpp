#pragma once

#include <ostream>

namespace vdelta::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `vdelta` tool: subcommands restore, forward, project.
/// Returns 0 on success, 1 on runtime failure, 2 on usage or config errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vdelta::cli
