#include "tucker/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tucker::run_cli(argc, argv, std::cout, std::cerr); }
