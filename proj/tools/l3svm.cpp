#include "l3svm/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return l3svm::run_cli(args, std::cout, std::cerr);
}
