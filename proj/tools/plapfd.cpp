#include <iostream>

#include "plapfd/cli.hpp"

int main(int argc, char** argv) { return plapfd::cli::run(argc, argv, std::cout, std::cerr); }
