#include <iostream>

#include "ms4cli/cli.hpp"

int main(int argc, char** argv) { return ms4::cli::run(argc, argv, std::cout, std::cerr); }
