#include <iostream>

#include "curlforce/cli.hpp"

int main(int argc, char** argv) { return curlforce::cli::run(argc, argv, std::cout, std::cerr); }
