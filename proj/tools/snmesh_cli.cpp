#include <iostream>

#include "snmesh/cli.hpp"

int main(int argc, char** argv) { return snmesh::run_cli(argc, argv, std::cout, std::cerr); }
