#include <iostream>

#include "mmse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmse::run_cli(args, std::cout, std::cerr);
}
