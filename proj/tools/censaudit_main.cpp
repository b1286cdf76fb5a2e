#include "censaudit/cli/cli.hpp"

int main(int argc, char** argv) { return censaudit::cli::run_cli(argc, argv); }
