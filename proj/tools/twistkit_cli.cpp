#include <iostream>
#include <string>
#include <vector>

#include "twistkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twk::cli_run(args, std::cout, std::cerr);
}
