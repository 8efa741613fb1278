#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nli/run_config.hpp"

namespace nli {

inline constexpr std::string_view kSchemaVersion = "1";

using Cell = std::variant<double, std::int64_t, std::string>;

/// Tabular command output.
///
/// CSV layout: one line "# metadata: <compact JSON>", a header row, then one
/// record per row. Doubles use 17 significant digits and '.' as decimal mark.
/// JSON layout: {"schema_version", "metadata", "rows": [{column: value}]}.
struct ResultTable {
    std::string schema_version{kSchemaVersion};
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    [[nodiscard]] std::size_t column(std::string_view name) const;
    /// Stable sort by (n_mean, tau, phi, pump); every table carries these columns.
    void sort_rows();

    [[nodiscard]] std::string to_csv() const;
    /// CSV without the metadata line (used for determinism checks).
    [[nodiscard]] std::string data_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string serialize(OutputFormat format) const;
};

[[nodiscard]] std::string format_cell(const Cell& cell);

} // namespace nli
