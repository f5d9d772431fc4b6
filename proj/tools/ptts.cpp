#include <iostream>
#include <string>
#include <vector>

#include "ptts/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ptts::dispatch(args, std::cout, std::cerr);
}
