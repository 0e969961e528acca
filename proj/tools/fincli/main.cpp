#include <iostream>
#include <string>
#include <vector>

#include "fincli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fincli::run(args, std::cout, std::cerr);
}
