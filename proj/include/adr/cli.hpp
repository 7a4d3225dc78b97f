#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adr {

/// Command-line entry point behind the `adr` executable, separated from
/// main() so tests can drive it with captured streams.
///
/// Subcommands: generate, train, evaluate, trace, plot. Global flags:
/// --seed, --out-dir (default: $ADR_OUT_DIR or "."), --params-file,
/// --quiet, --workers. Every run writes resolved_config_<subcommand>.txt
/// into the output directory.
///
/// Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags or
/// unusable inputs).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace adr
