#include <string>
#include <vector>

#include "mubtomo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mubtomo::run_cli(args);
}
