#include "pinnet/cli.hpp"

int main(int argc, char** argv) { return pinnet::cli_main(argc, argv); }
