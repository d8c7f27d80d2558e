#include "stlenf/cli.hpp"

int main(int argc, char** argv) { return stlenf::run_cli(argc, argv); }
