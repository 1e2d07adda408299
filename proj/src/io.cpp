#include "mubtomo/io.hpp"

#include <cstdio>

namespace mubtomo {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace mubtomo
