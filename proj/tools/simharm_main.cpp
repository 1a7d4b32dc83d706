#include <iostream>

#include "simharm/cli.hpp"

int main(int argc, char** argv) {
  return simharm::run_cli(argc, argv, std::cout, std::cerr);
}
