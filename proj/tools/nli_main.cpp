#include <iostream>

#include "nli/commands.hpp"

int main(int argc, char** argv) { return nli::run_cli(argc, argv, std::cout, std::cerr); }
