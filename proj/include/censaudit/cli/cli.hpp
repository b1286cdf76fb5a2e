#pragma once

#include <string>
#include <vector>

namespace censaudit::cli {

enum ExitCode : int { kOk = 0, kOperationalError = 1, kUsageError = 2 };

// Parses and runs one subcommand. argv[0] is the program name.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace censaudit::cli
