#include <vector>

#include "ilcc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ilcc::run_cli(args);
}
