#include <iostream>
#include <string>
#include <vector>

#include "komohe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return komohe::cli::run(args, std::cout, std::cerr);
}
