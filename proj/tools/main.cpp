#include <iostream>

#include "dlqg/cli.hpp"

int main(int argc, char** argv) { return dlqg::run_cli(argc, argv, std::cout, std::cerr); }
