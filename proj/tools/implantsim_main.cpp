#include "implantsim/cli.hpp"

int main(int argc, char** argv) { return implantsim::run_cli(argc, argv); }
