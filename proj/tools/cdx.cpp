#include <iostream>

#include "cdx/cli.hpp"

int main(int argc, char** argv) { return cdx::run_cli(argc, argv, std::cout, std::cerr); }
