#include <iostream>

#include "leanreg/cli/app.hpp"

int main(int argc, char** argv) {
  return leanreg::cli::run_main(argc, argv, std::cout, std::cerr);
}
