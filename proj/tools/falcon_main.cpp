#include "falcon/cli.hpp"

int main(int argc, char** argv) { return falcon::cli_main(argc, argv); }
