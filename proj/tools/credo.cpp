#include "credo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return credo::run_cli(argc, argv, std::cout, std::cerr); }
