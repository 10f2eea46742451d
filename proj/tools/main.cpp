#include <iostream>

#include "shufflecast/cli.hpp"

int main(int argc, char** argv) {
    return shufflecast::run_cli(argc, argv, std::cout, std::cerr);
}
