#include <iostream>

#include "cokrig/cli.hpp"

int main(int argc, char** argv) { return cokrig::cli::run(argc, argv, std::cout, std::cerr); }
