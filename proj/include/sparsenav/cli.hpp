#pragma once

#include <iosfwd>

namespace sparsenav {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;             // malformed config, bad flags, empty grid
inline constexpr int kExitTrainingCollision = 3;

// Entry point of the `sparsenav` tool: subcommands trial, sweep and tables.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsenav
