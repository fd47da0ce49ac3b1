#pragma once

#include <string>
#include <vector>

namespace sipseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitConfig = 2;

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace sipseg::cli
