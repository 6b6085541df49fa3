#include <iostream>

#include "polyskel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return polyskel::run_cli(args, std::cout, std::cerr);
}
