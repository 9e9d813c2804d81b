#include "promptrouter/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return promptrouter::run_cli(argc, argv, std::cout, std::cerr); }
