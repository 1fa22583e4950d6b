#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return irlscs::cli::run_cli(argc, argv, std::cout, std::cerr);
}
