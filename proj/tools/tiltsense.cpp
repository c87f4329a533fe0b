#include <iostream>

#include "tiltsense/cli/commands.hpp"

int main(int argc, char** argv) {
  return tiltsense::cli::run_cli(argc, argv, std::cout, std::cerr);
}
