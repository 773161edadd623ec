#include <iostream>

#include "spintop/cli.hpp"

int main(int argc, char **argv) { return spintop::cli::run(argc, argv, std::cout, std::cerr); }
