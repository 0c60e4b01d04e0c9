#include "rsmdp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    rsmdp::RunConfig config;
    if (auto status = rsmdp::parse_command_line(argc, argv, config, std::cout, std::cerr)) return *status;
    return rsmdp::run(config, std::cout, std::cerr);
}
