#include <iostream>

#include "lanet/cli/commands.hpp"

int main(int argc, char** argv) { return lanet::cli::run(argc, argv, std::cout, std::cerr); }
