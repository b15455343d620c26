#include <iostream>

#include "cframe/cli.hpp"

int main(int argc, char** argv) { return cframe::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
