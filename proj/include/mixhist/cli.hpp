#pragma once

#include <ostream>

namespace mixhist {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIO = 2, kExitData = 3 };

/// Entry point of the `mixhist` tool: subcommands index, query, eval, sweep, synth.
/// Standard output and error are passed in so the commands can be driven in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixhist
