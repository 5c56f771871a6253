#include <iostream>

#include "cellwave_cli/cli.hpp"

int main(int argc, char** argv) {
    return cellwave::cli::run(argc, argv, std::cout, std::cerr);
}
