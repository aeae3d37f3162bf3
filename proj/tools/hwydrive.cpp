#include "hwy/harness/commands.hpp"

int main(int argc, char** argv) { return hwy::harness::run_cli(argc, argv); }
