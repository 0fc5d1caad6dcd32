#include "tlbm/cli.hpp"

int main(int argc, char** argv) { return tlbm::run_cli(argc, argv); }
