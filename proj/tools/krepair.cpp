#include <iostream>

#include "krepair/cli.hpp"

int main(int argc, char** argv)
{
    return krepair::run_cli(argc, argv, std::cout, std::cerr);
}
