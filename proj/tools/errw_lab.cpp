#include <iostream>

#include "errw/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return errw::cli::run(args, std::cout, std::cerr);
}
