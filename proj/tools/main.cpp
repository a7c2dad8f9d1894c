#include <iostream>

#include "uavcov_cli.hpp"

int main(int argc, char** argv) { return uavcov::cli::run_main(argc, argv, std::cout, std::cerr); }
