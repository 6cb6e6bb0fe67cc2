#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdsq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the pdsq command line with `args` (program name excluded).
/// Returns the process exit status: 0 success, 1 runtime failure, 2 usage or config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdsq::cli
