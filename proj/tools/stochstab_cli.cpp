#include "stochstab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return stochstab::run_cli(argc, argv, std::cout, std::cerr); }
