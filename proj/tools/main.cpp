#include <iostream>

#include "pandora/cli.hpp"

int main(int argc, char** argv) {
    return pandora::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
