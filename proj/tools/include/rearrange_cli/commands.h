/// @file commands.h
/// @brief The analyze / plan / render commands behind the rearrange tool.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rearrange::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitInternal = 1;

/// Parses argv-style arguments (args[0] is the program name) and runs the
/// selected subcommand. Progress goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rearrange::cli
