#include "uca/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return uca::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
