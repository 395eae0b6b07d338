#include "ccmix/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ccmix::main_entry(argc, argv, std::cout, std::cerr); }
