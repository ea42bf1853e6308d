#include "polarfog/cli/cli.hpp"

int main(int argc, char** argv) { return polarfog::cli::run(argc, argv); }
