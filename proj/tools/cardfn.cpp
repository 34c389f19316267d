#include <iostream>
#include <string>
#include <vector>

#include "cardfn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cardfn::run(args, std::cout, std::cerr);
}
