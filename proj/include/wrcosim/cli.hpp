#pragma once

#include <iosfwd>

namespace wrcosim {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitSolver = 2, kExitDiverged = 3 };

/// Entry point of the `wrcosim` tool. Subcommands: check, run, mono, sweep,
/// lemma. The last line written to `out` is always a JSON object with the
/// keys "verdict" and "files".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wrcosim
