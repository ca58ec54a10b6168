#include <iostream>

#include "annokn/cli.hpp"

int main(int argc, char** argv) { return annokn::run_cli(argc, argv, std::cout, std::cerr); }
