#include <iostream>

#include "afp/cli.hpp"

int main(int argc, char** argv) { return afp::cli::run(argc, argv, std::cout, std::cerr); }
