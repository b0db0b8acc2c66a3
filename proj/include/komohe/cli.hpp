#pragma once

#include <ostream>
#include <span>
#include <string>

namespace komohe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. args excludes the program name. Machine-readable
/// output goes to out, diagnostics to err.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace komohe::cli
