#include <iostream>

#include "sparsenav/cli.hpp"

int main(int argc, char** argv) { return sparsenav::run_cli(argc, argv, std::cout, std::cerr); }
