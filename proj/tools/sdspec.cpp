#include <iostream>

#include "sdspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sdspec::run_cli(args, std::cout, std::cerr);
}
