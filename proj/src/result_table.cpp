#include "nli/result_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nli {

std::size_t ResultTable::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("result table has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

void ResultTable::sort_rows() {
    const std::size_t keys[] = {column("n_mean"), column("tau"), column("phi"), column("pump")};
    std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        for (auto k : keys) {
            if (a[k] < b[k]) return true;
            if (b[k] < a[k]) return false;
        }
        return false;
    });
}

std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (std::isnan(v)) return "nan";
                std::ostringstream os;
                os.imbue(std::locale::classic());
                os.precision(17);
                os << v;
                return os.str();
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        cell);
}

std::string ResultTable::data_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
        out += '\n';
    }
    return out;
}

std::string ResultTable::to_csv() const {
    nlohmann::json meta = metadata;
    meta["schema_version"] = schema_version;
    return "# metadata: " + meta.dump() + "\n" + data_csv();
}

nlohmann::json ResultTable::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["metadata"] = metadata;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < columns.size(); ++i)
            std::visit([&](const auto& v) { r[columns[i]] = v; }, row[i]);
        j["rows"].push_back(std::move(r));
    }
    return j;
}

std::string ResultTable::serialize(OutputFormat format) const {
    return format == OutputFormat::Json ? to_json().dump(2) + "\n" : to_csv();
}

} // namespace nli
