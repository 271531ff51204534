#include "sparsid/cli.hpp"

int main(int argc, char** argv) { return sparsid::run_cli(argc, argv); }
