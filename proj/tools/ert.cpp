#include <iostream>

#include "ert/cli/cli.hpp"

int main(int argc, char** argv) { return ert::cli::run(argc, argv, std::cout, std::cerr); }
