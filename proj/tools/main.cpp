#include <iostream>

#include "mixhist/cli.hpp"

int main(int argc, char** argv) { return mixhist::run_cli(argc, argv, std::cout, std::cerr); }
