#pragma once

#include <iosfwd>

namespace dpsim {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point of the dpsim executable. Normal output goes to `out`,
/// diagnostics and notices to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpsim
