#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nli/metrology.hpp"
#include "nli/pump_sources.hpp"

namespace nli {

inline constexpr std::string_view kEngineVersion = "0.1.0";

enum class Command { Pattern, Uncertainty, Minima, Scaling, Distribution, Fisher };
enum class OutputFormat { Csv, Json };

[[nodiscard]] std::string_view to_string(Command c) noexcept;
[[nodiscard]] Command parse_command(std::string_view text);
[[nodiscard]] std::string_view to_string(Estimator e) noexcept;
[[nodiscard]] Estimator parse_estimator(std::string_view text);

/// Inclusive grid written as "start:stop:count" (start < stop, count >= 2).
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    [[nodiscard]] static GridSpec parse(std::string_view text);
    [[nodiscard]] std::vector<double> points() const;
    [[nodiscard]] std::string to_string() const;
    void validate() const;
};

/// Parses "a,b,c" or a grid descriptor "start:stop:count".
[[nodiscard]] std::vector<double> parse_value_list(std::string_view text);

struct RunConfig {
    Command command = Command::Pattern;
    std::vector<PumpKind> pumps{PumpKind::Fock};
    std::vector<double> n_values;

    std::vector<double> tau_values;      ///< explicit tau list
    std::optional<GridSpec> tau_grid;    ///< explicit absolute tau grid
    double tau_range_factor = kDefaultTauRangeFactor;
    int tau_count = kDefaultTauCount;
    double low_gain_factor = 0.02;       ///< default sweeps start at this multiple of N^(-1/2)

    std::optional<GridSpec> phi_grid;

    double delta = kDefaultDelta;
    double truncation_threshold = 1e-5;
    std::optional<int> truncation_reference;
    double fisher_step = kDefaultFisherStep;
    std::optional<double> fisher_phi;

    Estimator estimator = Estimator::ErrorPropagation;
    std::string distribution_at;         ///< "", "tau_min" or "tau_1"
    double fit_n_min = 10.0;
    double max_coherent_n = 100.0;

    std::string output_path;             ///< empty = stdout
    OutputFormat format = OutputFormat::Csv;
    unsigned workers = 0;                ///< 0 = all cores
    bool use_cache = true;
    std::optional<std::filesystem::path> cache_dir;

    /// Throws UsageError describing the first violated constraint.
    void validate() const;
    [[nodiscard]] MetrologyOptions metrology() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Cache directory: explicit flag, else $NLI_CACHE_DIR, else
/// $XDG_CACHE_HOME/nli-sim, else $HOME/.cache/nli-sim.
[[nodiscard]] std::optional<std::filesystem::path> resolve_cache_dir(const RunConfig& config);

} // namespace nli
