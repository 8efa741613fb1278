#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nli/result_table.hpp"
#include "nli/run_config.hpp"
#include "nli/spectral_cache.hpp"

namespace nli {

/// A table plus per-item failures. Failed items are omitted from the rows and
/// listed here (and in metadata["errors"]); the CLI then exits with code 3.
struct CommandOutcome {
    ResultTable table;
    std::vector<std::string> errors;
};

[[nodiscard]] CommandOutcome cmd_pattern(const RunConfig& config, SpectralCache& cache);
[[nodiscard]] CommandOutcome cmd_uncertainty(const RunConfig& config, SpectralCache& cache);
[[nodiscard]] CommandOutcome cmd_fisher(const RunConfig& config, SpectralCache& cache);
/// Handles both `minima` and `scaling`; the latter adds metadata["fit"].
[[nodiscard]] CommandOutcome cmd_minima(const RunConfig& config, SpectralCache& cache);
[[nodiscard]] CommandOutcome cmd_distribution(const RunConfig& config, SpectralCache& cache);

/// Validates the config, dispatches on config.command and fills the common metadata.
[[nodiscard]] CommandOutcome run_command(const RunConfig& config, SpectralCache& cache);

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3 };

/// Parses argv into a RunConfig. Throws UsageError on invalid input.
/// Returns nullopt after printing help.
[[nodiscard]] std::optional<RunConfig> parse_cli(int argc, const char* const* argv, std::ostream& out);

/// Full front end: parse, run, write the table to --output (or `out`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nli
