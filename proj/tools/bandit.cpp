#include <iostream>

#include "bandit/cli.hpp"

int main(int argc, char** argv)
{
    return bandit::run_cli(argc, argv, std::cout, std::cerr);
}
