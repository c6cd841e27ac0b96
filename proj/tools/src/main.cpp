#include <iostream>

#include "bioinsure_cli/cli.hpp"

int main(int argc, char** argv) { return bioinsure::cli::main_entry(argc, argv, std::cout, std::cerr); }
