#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "coherent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return coherent::run_cli(args, std::cout, std::cerr,
                           [](const char* name) { return std::getenv(name); });
}
