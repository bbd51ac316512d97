#include "kfree/cli.hpp"

int main(int argc, char** argv) { return kfree::run_cli(argc, argv); }
