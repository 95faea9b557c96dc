#include <iostream>

#include "trilinear/cli.hpp"

int main(int argc, char** argv) {
  return trilinear::cli::main_entry(argc, argv, std::cout, std::cerr);
}
