#include <iostream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "skpower/threads.hpp"

int main(int argc, char** argv) {
  skpower::init_threads_from_env();
  std::vector<std::string> args(argv, argv + argc);
  return skpower::cli::run_cli(args, std::cout, std::cerr);
}
