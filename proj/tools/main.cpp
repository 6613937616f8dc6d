#include <iostream>
#include <string>
#include <vector>

#include "vorann/cli.hpp"

int main(int argc, char** argv) {
  return vorann::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
