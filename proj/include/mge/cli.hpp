#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitConfig = 2;

/// Runs the `mge` command line. `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime/data error, 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mge::cli
