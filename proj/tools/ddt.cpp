#include "ddt/cli.hpp"

int main(int argc, char** argv) { return ddt::cli::run(argc, argv); }
