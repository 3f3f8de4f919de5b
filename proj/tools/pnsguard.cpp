#include <iostream>

#include "pnsguard/app/commands.hpp"

int main(int argc, char** argv) {
  return pnsguard::app::run_cli(argc, argv, std::cout, std::cerr);
}
