#include <iostream>

#include "wrcosim/cli.hpp"

int main(int argc, char** argv) { return wrcosim::run_cli(argc, argv, std::cout, std::cerr); }
