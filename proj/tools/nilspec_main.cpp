#include <iostream>

#include "nilspec/cli.hpp"

int main(int argc, char** argv) { return nilspec::run_cli(argc, argv, std::cout, std::cerr); }
