#include "hop/cli.hpp"

int main(int argc, char** argv) { return hop::cli::main(argc, argv); }
