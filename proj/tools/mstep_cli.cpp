#include "mstep/harness/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mstep::harness::run_cli(argc, argv, std::cout, std::cerr); }
