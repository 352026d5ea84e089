#include "gaugetrace/cli.hpp"

int main(int argc, char** argv) { return gaugetrace::cli::run(argc, argv); }
