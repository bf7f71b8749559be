#include "synbeats/cli.hpp"

int main(int argc, char** argv) { return synbeats::run_cli(argc, argv); }
