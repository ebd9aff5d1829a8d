#pragma once

#include <exception>

namespace emoadapt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e);

// Parses argv and runs one subcommand. Never throws.
int run(int argc, char** argv);

}  // namespace emoadapt::cli
