#include <iostream>
#include <string>
#include <vector>

#include "carma_hawkes/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return carma_hawkes::cli::run(args, std::cout, std::cerr);
}
