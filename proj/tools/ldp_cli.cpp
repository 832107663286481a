#include "ldp/cli.hpp"

int main(int argc, char** argv) { return ldp::cli::run(argc, argv); }
