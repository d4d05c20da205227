#include <iostream>
#include <string>
#include <vector>

#include "ptbsim/cli/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ptbsim::cli::run_cli(args, std::cout, std::cerr);
}
