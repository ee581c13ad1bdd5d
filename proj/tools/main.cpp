#include "smoothsaa/io/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return smoothsaa::io::run_cli(argc, argv, std::cout, std::cerr); }
