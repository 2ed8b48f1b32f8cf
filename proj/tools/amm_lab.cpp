#include <iostream>

#include "ammlab/cli.hpp"

int main(int argc, char** argv) {
    return ammlab::cli::run_cli(argc, argv, std::cout, std::cerr);
}
