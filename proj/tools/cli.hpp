#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gencs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the gencs binary and the tests. args excludes the
/// program name. Returns 0 on success, 2 for usage/config errors and 1 for
/// runtime failures. Nothing is written to disk unless the subcommand
/// completes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gencs::cli
