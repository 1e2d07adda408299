#pragma once

#include <string>
#include <vector>

namespace mubtomo {

/// Command-line entry point (also used in-process by tests).
/// args excludes the program name. Exit codes: 0 success, 1 usage,
/// 2 certification/physicality failure, 3 I/O.
int run_cli(const std::vector<std::string>& args);

}  // namespace mubtomo
