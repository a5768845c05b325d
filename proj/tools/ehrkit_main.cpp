#include <iostream>
#include <string>
#include <vector>

#include "ehrkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ehrkit::cli::run(args, std::cout, std::cerr);
}
