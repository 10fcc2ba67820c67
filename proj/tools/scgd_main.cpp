#include <iostream>

#include "scgd/cli.hpp"

int main(int argc, char** argv) {
  return scgd::run_cli(argc, argv, std::cout, std::cerr);
}
