#include "udnsim/cli.hpp"

int main(int argc, char** argv)
{
    return udnsim::run_cli(argc, argv);
}
