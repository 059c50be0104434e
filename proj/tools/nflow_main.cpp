#include "nflow/cli.hpp"

int main(int argc, char** argv) { return nflow::run_cli(argc, argv); }
