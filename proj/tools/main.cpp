#include "acap/cli.hpp"

int main(int argc, char** argv) {
    return acap::cli::dispatch(argc, argv);
}
