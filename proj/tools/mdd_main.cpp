#include <iostream>
#include <string>
#include <vector>

#include "mdd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mdd::cli::run(args, std::cout, std::cerr);
}
