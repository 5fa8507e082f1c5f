#include "hestonweak/cli.hpp"

int main(int argc, char** argv) { return heston::run_cli(argc, argv); }
