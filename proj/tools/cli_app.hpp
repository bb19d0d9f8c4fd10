#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bteb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Entry point of the bteb tool. Returns the process exit code:
/// 0 success, 1 usage or config error, 2 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bteb::cli
