#include <iostream>

#include "unirigid/cli.hpp"

int main(int argc, char** argv) { return unirigid::cli::run(argc, argv, std::cout, std::cerr); }
