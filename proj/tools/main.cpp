#include "cli.hpp"

int main(int argc, char** argv) { return emoadapt::cli::run(argc, argv); }
