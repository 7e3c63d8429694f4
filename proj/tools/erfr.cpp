#include "erfr/harness.hpp"

#include <iostream>

int main(int argc, char** argv) { return erfr::run_cli(argc, argv, std::cout, std::cerr); }
