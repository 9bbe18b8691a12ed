#include <iostream>

#include "pivlp/cli.hpp"

int main(int argc, char** argv) { return pivlp::cli::run(argc, argv, std::cout, std::cerr); }
