#include <string>
#include <vector>

#include "topopt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return topopt::run_cli(args);
}
