#include "bcolab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bcolab::cli::run(argc, argv, std::cout, std::cerr); }
