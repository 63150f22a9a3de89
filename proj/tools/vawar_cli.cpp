#include <iostream>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return vawar::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
