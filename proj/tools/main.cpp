#include <iostream>

#include "scarp/cli.hpp"

int main(int argc, char** argv) { return scarp::cli::run_cli(argc, argv, std::cout, std::cerr); }
