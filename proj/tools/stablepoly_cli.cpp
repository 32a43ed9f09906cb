#include "stablepoly/cli_io.hpp"

int main(int argc, char** argv) { return stablepoly::run_cli(argc, argv); }
