#pragma once

#include <string>

namespace mubtomo {

/// Shortest decimal form that round-trips the double exactly.
std::string fmt_double(double x);

}  // namespace mubtomo
