#include <iostream>

#include "polcascade/cli.hpp"

int main(int argc, char** argv) { return polcascade::cli::run_command(argc, argv, std::cout, std::cerr); }
