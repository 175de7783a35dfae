#include "msem/experiment.hpp"

#include <iostream>

int main(int argc, char** argv) { return msem::run_cli(argc, argv, std::cout, std::cerr); }
