#include <iostream>

#include "sublab/cli.hpp"

int main(int argc, char** argv) { return sublab::cli::run(argc, argv, std::cout, std::cerr); }
