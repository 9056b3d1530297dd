#include <iostream>

#include "ggc/cli.hpp"

int main(int argc, char** argv) { return ggc::cli::run(argc, argv, std::cout, std::cerr); }
