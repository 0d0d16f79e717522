#include "expdiv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return expdiv::cli::run(argc, argv, std::cout, std::cerr); }
