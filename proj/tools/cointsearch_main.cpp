#include <iostream>

#include "cointsearch/cli.hpp"

int main(int argc, char** argv) { return cointsearch::run_cli(argc, argv, std::cout, std::cerr); }
