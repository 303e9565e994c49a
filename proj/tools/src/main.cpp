#include "rearrange_cli/commands.h"

#include <iostream>

int main(int argc, char** argv) {
  return rearrange::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
