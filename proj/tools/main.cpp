#include "bp/cli.hpp"

int main(int argc, char** argv) {
    return bp::cli_main({argv + 1, argv + argc});
}
