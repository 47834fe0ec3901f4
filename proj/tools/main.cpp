#include <iostream>

#include "spnjd/cli.hpp"

int main(int argc, char** argv) { return spnjd::cli::main_entry(argc, argv, std::cout, std::cerr); }
