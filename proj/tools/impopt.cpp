#include <iostream>

#include "impopt/cli.hpp"

int main(int argc, char** argv) { return impopt::cli::run(argc, argv, std::cout, std::cerr); }
