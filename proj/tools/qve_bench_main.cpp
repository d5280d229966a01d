#include "qve/cli.hpp"

int main(int argc, char** argv) { return qve::cli_main(argc, argv); }
