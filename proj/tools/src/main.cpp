#include <iostream>

#include "countkit/cli.hpp"

int main(int argc, char** argv) { return countkit::cli::main_entry(argc, argv, std::cout, std::cerr); }
