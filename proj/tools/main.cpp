#include "harvest/cli.hpp"

int main(int argc, char** argv) { return harvest::run_cli(argc, argv); }
