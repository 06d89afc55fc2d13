#pragma once

#include <ostream>

namespace tvx {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // validation, precondition, I/O, failed checks
inline constexpr int kExitUsage = 2;   // bad arguments, wrong point arity

/// Entry point of the `tvx` tool. Point-wise commands print their report to
/// `out`; `scan` writes a run directory under --out (default $TVX_OUT_DIR,
/// else "tvx-runs") and prints its summary. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvx
