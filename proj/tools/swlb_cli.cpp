#include <iostream>

#include "swlb/cli.hpp"

int main(int argc, char** argv) { return swlb::cli::run(argc, argv, std::cout, std::cerr); }
