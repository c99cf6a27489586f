#include "frackbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return frackbench::cli::main(argc, argv, std::cout, std::cerr); }
