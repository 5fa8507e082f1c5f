#pragma once

namespace heston {

/// Entry point of the heston-weak tool, callable in-process for testing.
/// Subcommands: price, simulate, converge, fit. Returns the process exit
/// code: 0 on success, 2 on usage errors, 3 on numerical failures.
int run_cli(int argc, const char* const* argv);

}  // namespace heston
