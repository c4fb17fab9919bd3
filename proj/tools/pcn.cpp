#include <iostream>

#include "pcn/cli.hpp"

int main(int argc, char** argv) {
  return pcn::cli::run_main(argc, argv, std::cout, std::cerr);
}
