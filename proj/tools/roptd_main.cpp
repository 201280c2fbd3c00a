#include "roptd/cli.hpp"

int main(int argc, char** argv) { return roptd::run_cli(argc, argv); }
