#include "datesso/cli.hpp"

int main(int argc, char** argv) {
    return datesso::run_cli(argc, argv);
}
