#include "chartdig/cli.hpp"

int main(int argc, char** argv)
{
    return chartdig::cli::run(argc, argv);
}
