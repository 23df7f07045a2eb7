#include <iostream>
#include <string>
#include <vector>

#include "censorbias/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return censorbias::run_cli(args, std::cout, std::cerr);
}
