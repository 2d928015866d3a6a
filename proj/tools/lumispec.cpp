#include <iostream>

#include "lumispec/cli.hpp"

int main(int argc, char** argv) { return lumispec::cli::run(argc, argv, std::cout, std::cerr); }
