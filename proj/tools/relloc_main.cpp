#include <iostream>

#include "relloc/cli.hpp"

int main(int argc, char** argv) { return relloc::run_cli(argc, argv, std::cout, std::cerr); }
