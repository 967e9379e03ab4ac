#include <iostream>

#include "optoforce/cli.hpp"

int main(int argc, char** argv) { return optoforce::run_cli(argc, argv, std::cout, std::cerr); }
