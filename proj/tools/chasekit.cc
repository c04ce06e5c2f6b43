#include <iostream>
#include <string>
#include <vector>

#include "chasekit/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chasekit::run_cli(args, std::cout, std::cerr);
}
