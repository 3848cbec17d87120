#include <iostream>

#include "hsharp/cli.hpp"

int main(int argc, char** argv) { return hsharp::cli::main_entry(argc, argv, std::cout, std::cerr); }
