#include <iostream>

#include "hfair/cli.hpp"

int main(int argc, char** argv) {
    return hfair::cli::run(argc, argv, std::cout, std::cerr);
}
