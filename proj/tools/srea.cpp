#include <iostream>

#include "srea/cli/commands.hpp"

int main(int argc, char** argv) { return srea::cli::run_cli(argc, argv, std::cout, std::cerr); }
