#include <iostream>

#include "vlcsim/cli.hpp"

int main(int argc, char** argv) { return vlcsim::run_cli(argc, argv, std::cout, std::cerr); }
