#include <iostream>

#include "pcwlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pcwlab::cli::run(args, std::cout, std::cerr);
}
