#include <iostream>

#include "rpde/cli.hpp"

int main(int argc, char** argv) { return rpde::cli::run(argc, argv, std::cout, std::cerr); }
