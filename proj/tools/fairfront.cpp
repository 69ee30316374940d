#include "fairfront/cli.hpp"

int main(int argc, char** argv) {
    return fairfront::cli_main(argc, argv);
}
