#include <iostream>

#include "tvx/cli.hpp"

int main(int argc, char** argv) { return tvx::run_cli(argc, argv, std::cout, std::cerr); }
