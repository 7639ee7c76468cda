#include <iostream>

#include "spellforge/cli.hpp"

int main(int argc, char** argv) { return spellforge::run_cli(argc, argv, std::cout, std::cerr); }
