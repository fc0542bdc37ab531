#include "smax/commands.hpp"

int main(int argc, char** argv) { return smax::run_cli(argc, argv); }
