#include <iostream>

#include "dtdob_cli/cli.hpp"

int main(int argc, char** argv) { return dtdob::cli::run(argc, argv, std::cout, std::cerr); }
