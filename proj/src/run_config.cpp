#include "nli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace nli {

namespace {

double parse_double(std::string_view text, std::string_view what) {
    std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw UsageError("invalid number '" + s + "' in " + std::string(what));
    return v;
}

int parse_int(std::string_view text, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw UsageError("invalid integer '" + std::string(text) + "' in " + std::string(what));
    return v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string_view to_string(Command c) noexcept {
    switch (c) {
    case Command::Pattern: return "pattern";
    case Command::Uncertainty: return "uncertainty";
    case Command::Minima: return "minima";
    case Command::Scaling: return "scaling";
    case Command::Distribution: return "distribution";
    case Command::Fisher: return "fisher";
    }
    return "unknown";
}

Command parse_command(std::string_view text) {
    for (auto c : {Command::Pattern, Command::Uncertainty, Command::Minima, Command::Scaling, Command::Distribution,
                   Command::Fisher})
        if (to_string(c) == text) return c;
    throw UsageError("unknown command '" + std::string(text) + "'");
}

std::string_view to_string(Estimator e) noexcept { return e == Estimator::Fisher ? "fisher" : "ep"; }

Estimator parse_estimator(std::string_view text) {
    if (text == "ep") return Estimator::ErrorPropagation;
    if (text == "fisher") return Estimator::Fisher;
    throw UsageError("unknown estimator '" + std::string(text) + "' (expected ep or fisher)");
}

GridSpec GridSpec::parse(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (a == std::string_view::npos || b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
        throw UsageError("grid '" + std::string(text) + "' must have the form start:stop:count");
    GridSpec g{parse_double(text.substr(0, a), "grid start"), parse_double(text.substr(a + 1, b - a - 1), "grid stop"),
               parse_int(text.substr(b + 1), "grid count")};
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (!(start < stop)) throw UsageError("grid " + to_string() + ": start must be < stop");
    if (count < 2) throw UsageError("grid " + to_string() + ": count must be >= 2");
}

std::vector<double> GridSpec::points() const { return TauGrid{start, stop, count}.points(); }

std::string GridSpec::to_string() const {
    return format_double(start) + ":" + format_double(stop) + ":" + std::to_string(count);
}

std::vector<double> parse_value_list(std::string_view text) {
    if (text.find(':') != std::string_view::npos) return GridSpec::parse(text).points();
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(parse_double(item, "value list"));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

void RunConfig::validate() const {
    if (pumps.empty()) throw UsageError("at least one pump kind is required");
    if (n_values.empty()) throw UsageError("at least one pump photon number is required");
    for (auto kind : pumps)
        for (double n : n_values) {
            PumpSpec{kind, n, 0.0}.validate();
            if (kind == PumpKind::Coherent && n > max_coherent_n)
                throw UsageError("coherent pump N = " + format_double(n) + " exceeds the cap " +
                                 format_double(max_coherent_n) + " (raise --max-coherent-n)");
        }
    for (double t : tau_values)
        if (!(t >= 0.0)) throw UsageError("tau values must be >= 0");
    if (tau_grid) {
        tau_grid->validate();
        if (tau_grid->start < 0.0) throw UsageError("tau grid must not start below 0");
    }
    if (phi_grid) phi_grid->validate();
    if (!(delta > 0.0)) throw UsageError("delta must be > 0");
    if (!(truncation_threshold > 0.0 && truncation_threshold < 1.0))
        throw UsageError("truncation threshold must lie in (0, 1)");
    if (!(fisher_step > 0.0)) throw UsageError("fisher step must be > 0");
    if (!(tau_range_factor > 1.0)) throw UsageError("tau range factor must be > 1");
    if (tau_count < 100) throw UsageError("tau count must be >= 100");
    if (!(low_gain_factor > 0.0)) throw UsageError("low-gain factor must be > 0");
    if (!distribution_at.empty() && distribution_at != "tau_min" && distribution_at != "tau_1")
        throw UsageError("--at must be tau_min or tau_1");
    if (command == Command::Distribution && distribution_at.empty() && tau_values.empty())
        throw UsageError("distribution needs --tau or --at");
    const bool scans = command == Command::Minima || command == Command::Scaling ||
                       (command == Command::Distribution && !distribution_at.empty());
    if (scans)
        for (double n : n_values)
            if (!(n > 0.0)) throw UsageError("minimum scans need N > 0");
}

MetrologyOptions RunConfig::metrology() const {
    MetrologyOptions o;
    o.delta = delta;
    o.fisher_step = fisher_step;
    o.fisher_phi = fisher_phi;
    o.truncation.threshold = truncation_threshold;
    o.truncation.reference_sector = truncation_reference;
    return o;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["command"] = to_string(command);
    for (auto k : pumps) j["pumps"].push_back(to_string(k));
    j["n_values"] = n_values;
    j["tau_values"] = tau_values;
    j["tau_grid"] = tau_grid ? nlohmann::json(tau_grid->to_string()) : nlohmann::json(nullptr);
    j["tau_range_factor"] = tau_range_factor;
    j["tau_count"] = tau_count;
    j["low_gain_factor"] = low_gain_factor;
    j["phi_grid"] = phi_grid ? nlohmann::json(phi_grid->to_string()) : nlohmann::json(nullptr);
    j["delta"] = delta;
    j["truncation_threshold"] = truncation_threshold;
    j["truncation_reference"] = truncation_reference ? nlohmann::json(*truncation_reference) : nlohmann::json("round(N)");
    j["fisher_step"] = fisher_step;
    j["fisher_phi"] = fisher_phi ? nlohmann::json(*fisher_phi) : nlohmann::json("pi+delta");
    j["estimator"] = to_string(estimator);
    j["distribution_at"] = distribution_at;
    j["fit_n_min"] = fit_n_min;
    j["max_coherent_n"] = max_coherent_n;
    j["format"] = format == OutputFormat::Json ? "json" : "csv";
    j["use_cache"] = use_cache;
    return j;
}

std::optional<std::filesystem::path> resolve_cache_dir(const RunConfig& config) {
    if (!config.use_cache) return std::nullopt;
    if (config.cache_dir) return config.cache_dir;
    if (const char* env = std::getenv("NLI_CACHE_DIR"); env && *env) return std::filesystem::path(env);
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "nli-sim";
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "nli-sim";
    return std::nullopt;
}

} // namespace nli
