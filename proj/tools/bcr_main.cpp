#include "bcr/cli.hpp"

int main(int argc, char** argv) { return bcr::cli::run_main(argc, argv); }
