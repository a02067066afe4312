#pragma once

namespace nhsl::cli {

/// Parse argv, dispatch the subcommand, report errors on stderr.
/// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
int run_cli(int argc, char** argv);

} // namespace nhsl::cli
