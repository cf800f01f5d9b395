#include <iostream>
#include <string>
#include <vector>

#include "holofib/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return holofib::run_cli(args, std::cout, std::cerr);
}
