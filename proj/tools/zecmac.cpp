#include <iostream>

#include "zecmac/cli.hpp"

int main(int argc, char** argv) { return zecmac::cli::run(argc, argv, std::cout, std::cerr); }
