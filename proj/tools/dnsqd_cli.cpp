#include <dnsqd/cli.hpp>

int main(int argc, char** argv)
{
    return dnsqd::cli::main(argc, argv);
}
