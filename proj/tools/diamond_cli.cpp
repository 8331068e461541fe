#include <iostream>

#include "diamond/cli.hpp"

int main(int argc, char** argv) { return diamond::cli::run(argc, argv, std::cout, std::cerr); }
