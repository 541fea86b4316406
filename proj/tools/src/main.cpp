#include <iostream>

#include "hypermoment/cli/cli.hpp"

int main(int argc, char** argv) {
  return hypermoment::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
