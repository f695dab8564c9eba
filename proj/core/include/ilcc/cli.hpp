#pragma once

#include <string>
#include <vector>

namespace ilcc {

/// The `ilcc` command line: subcommands segment, find-board, corners-3d,
/// calibrate, evaluate, simulate, sweep. Returns 0 on success, 1 on a
/// domain error (printed with its taxonomy name), 2 on a usage error.
/// Re-entrant; all state is per-call.
int run_cli(const std::vector<std::string>& args);

}  // namespace ilcc
