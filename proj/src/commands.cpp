#include "nli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "nli/parallel.hpp"

namespace nli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string describe(PumpKind kind, double n, double tau) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind) << " N=" << n << " tau=" << tau;
    return os.str();
}

std::vector<double> default_tau_grid(const RunConfig& c, double n) {
    if (c.tau_grid) return c.tau_grid->points();
    if (!c.tau_values.empty()) return c.tau_values;
    if (!(n > 0.0)) throw UsageError("a default tau grid needs N > 0; pass --tau or --tau-grid");
    const double edge = 1.0 / std::sqrt(n);
    return TauGrid{c.low_gain_factor * edge, c.tau_range_factor * edge, c.tau_count}.points();
}

struct Job {
    PumpKind kind;
    double n;
    double tau;
};

std::vector<Job> tau_jobs(const RunConfig& c) {
    std::vector<Job> jobs;
    for (auto kind : c.pumps)
        for (double n : c.n_values)
            for (double tau : default_tau_grid(c, n)) jobs.push_back({kind, n, tau});
    return jobs;
}

/// Runs fn over all jobs in parallel; rows and errors are collected by job index.
template <typename Fn>
CommandOutcome run_jobs(const RunConfig& c, const std::vector<Job>& jobs, std::vector<std::string> columns, Fn&& fn) {
    std::vector<std::vector<std::vector<Cell>>> rows(jobs.size());
    std::vector<std::string> errors(jobs.size());
    parallel_for(jobs.size(), c.workers, [&](std::size_t i) {
        try {
            rows[i] = fn(jobs[i]);
        } catch (const NumericalError& e) {
            errors[i] = describe(jobs[i].kind, jobs[i].n, jobs[i].tau) + ": " + e.what();
        }
    });
    CommandOutcome out;
    out.table.columns = std::move(columns);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (auto& r : rows[i]) out.table.rows.push_back(std::move(r));
        if (!errors[i].empty()) out.errors.push_back(std::move(errors[i]));
    }
    return out;
}

std::int64_t flag(bool b) { return b ? 1 : 0; }

bool high_gain(double n, double tau) { return n > 0.0 && tau > 1.0 / std::sqrt(n); }

} // namespace

CommandOutcome cmd_pattern(const RunConfig& c, SpectralCache& cache) {
    const auto phis = (c.phi_grid ? *c.phi_grid : GridSpec{0.0, kTwoPi, 361}).points();
    std::vector<Job> jobs;
    const std::vector<double> taus = c.tau_values.empty() ? std::vector<double>{0.2, 0.5, 0.9} : c.tau_values;
    for (auto kind : c.pumps)
        for (double n : c.n_values)
            for (double tau : taus) jobs.push_back({kind, n, tau});

    auto out = run_jobs(c, jobs, {"pump", "n_mean", "tau", "phi", "n_out_mean", "n_out_var"}, [&](const Job& j) {
        const Interferometer nli({j.kind, j.n, 0.0}, InteractionStrength(j.tau), cache, c.metrology().truncation);
        std::vector<std::vector<Cell>> rows;
        for (double phi : phis) {
            const auto st = nli.statistics(phi);
            rows.push_back({std::string(to_string(j.kind)), j.n, j.tau, phi, st.n_out_mean, st.n_out_var});
        }
        return rows;
    });
    out.table.metadata["phi_grid_used"] = (c.phi_grid ? *c.phi_grid : GridSpec{0.0, kTwoPi, 361}).to_string();
    out.table.metadata["tau_values_used"] = taus;
    return out;
}

CommandOutcome cmd_uncertainty(const RunConfig& c, SpectralCache& cache) {
    const auto opts = c.metrology();
    const double phi = std::numbers::pi + c.delta;
    return run_jobs(c, tau_jobs(c),
                    {"pump", "n_mean", "tau", "phi", "delta", "dphi_ep", "dphi_fi", "dphi_pa_formula", "dphi_pa_adhoc",
                     "n_int", "n_out", "shot_noise", "high_gain"},
                    [&](const Job& j) {
                        const auto pt = phase_uncertainty_ep({j.kind, j.n, 0.0}, InteractionStrength(j.tau), opts, cache);
                        return std::vector<std::vector<Cell>>{
                            {std::string(to_string(j.kind)), j.n, j.tau, phi, c.delta, pt.dphi_ep, pt.dphi_fi,
                             pt.dphi_pa_formula, pt.dphi_pa_adhoc, pt.n_int, pt.n_out, shot_noise(j.n),
                             flag(high_gain(j.n, j.tau))}};
                    });
}

CommandOutcome cmd_fisher(const RunConfig& c, SpectralCache& cache) {
    const auto opts = c.metrology();
    const double phi = opts.fisher_phi.value_or(std::numbers::pi + c.delta);
    return run_jobs(c, tau_jobs(c),
                    {"pump", "n_mean", "tau", "phi", "fisher_information", "dphi_fi", "dphi_ep", "high_gain"},
                    [&](const Job& j) {
                        const Interferometer nli({j.kind, j.n, 0.0}, InteractionStrength(j.tau), cache, opts.truncation);
                        const double f = fisher_information_near_dark(nli, opts.fisher_offset(), opts.fisher_step);
                        if (!(f > 0.0)) throw NumericalError("no phase response in Fisher information");
                        return std::vector<std::vector<Cell>>{{std::string(to_string(j.kind)), j.n, j.tau, phi, f,
                                                               1.0 / std::sqrt(f),
                                                               dphi_error_propagation(nli, c.delta),
                                                               flag(high_gain(j.n, j.tau))}};
                    });
}

CommandOutcome cmd_minima(const RunConfig& c, SpectralCache& cache) {
    const auto opts = c.metrology();
    const double phi = std::numbers::pi + c.delta;
    CommandOutcome out;
    out.table.columns = {"pump",  "n_mean",     "tau",          "phi",          "kind",          "estimator",
                         "dphi",  "shot_noise", "below_shot_noise", "tau_grid_start", "tau_grid_stop", "tau_grid_count"};
    nlohmann::json fits = nlohmann::json::array();

    for (auto kind : c.pumps) {
        std::vector<std::pair<double, double>> first_series;
        for (double n : c.n_values) {
            const auto grid = TauGrid::high_gain(n, c.tau_range_factor, c.tau_count);
            try {
                const auto rep = scan_minima({kind, n, 0.0}, grid, c.estimator, opts, cache, c.workers);
                const double sn = shot_noise(n);
                auto row = [&](double tau, const char* which, double dphi) {
                    out.table.rows.push_back({std::string(to_string(kind)), n, tau, phi, std::string(which),
                                              std::string(to_string(c.estimator)), dphi, sn, flag(dphi < sn),
                                              grid.start, grid.stop, static_cast<std::int64_t>(grid.count)});
                };
                row(rep.tau_1, "first", rep.dphi_at_tau_1);
                row(rep.tau_min, "lowest", rep.dphi_at_tau_min);
                first_series.emplace_back(n, rep.dphi_at_tau_1);
            } catch (const NumericalError& e) {
                out.errors.push_back(describe(kind, n, grid.start) + ": " + e.what());
            }
        }
        if (c.command == Command::Scaling) {
            try {
                const auto fit = fit_heisenberg(first_series, c.fit_n_min);
                const auto free = fit_power_law(first_series, c.fit_n_min);
                fits.push_back({{"pump", to_string(kind)},
                                {"estimator", to_string(c.estimator)},
                                {"series", "first"},
                                {"exponent_fixed", fit.exponent_fixed},
                                {"prefactor", fit.prefactor},
                                {"fit_n_min", fit.fit_n_min},
                                {"points_used", fit.points.size()},
                                {"free_slope_exponent", free.exponent},
                                {"free_slope_prefactor", free.prefactor}});
            } catch (const NumericalError& e) {
                out.errors.push_back(std::string(to_string(kind)) + " fit: " + e.what());
            }
        }
    }
    if (c.command == Command::Scaling) out.table.metadata["fit"] = fits;
    return out;
}

CommandOutcome cmd_distribution(const RunConfig& c, SpectralCache& cache) {
    const auto opts = c.metrology();
    CommandOutcome out;
    out.table.columns = {"pump", "n_mean", "tau", "phi", "nu", "probability"};
    nlohmann::json used = nlohmann::json::array();
    for (auto kind : c.pumps)
        for (double n : c.n_values) {
            const PumpSpec pump{kind, n, 0.0};
            std::vector<double> taus = c.tau_values;
            if (!c.distribution_at.empty()) {
                try {
                    const auto rep = scan_minima(pump, TauGrid::high_gain(n, c.tau_range_factor, c.tau_count),
                                                 c.estimator, opts, cache, c.workers);
                    taus = {c.distribution_at == "tau_1" ? rep.tau_1 : rep.tau_min};
                } catch (const NumericalError& e) {
                    out.errors.push_back(describe(kind, n, 0.0) + ": " + e.what());
                    continue;
                }
            }
            for (double tau : taus) {
                const auto st = run_amplifier_a(pump, InteractionStrength(tau), cache, opts.truncation);
                used.push_back({{"pump", to_string(kind)}, {"n_mean", n}, {"tau", tau}, {"n_int", st.n_int_mean}});
                for (std::size_t nu = 0; nu < st.distribution_int.size(); ++nu)
                    out.table.rows.push_back({std::string(to_string(kind)), n, tau, 0.0,
                                              static_cast<std::int64_t>(nu), st.distribution_int[nu]});
            }
        }
    out.table.metadata["internal_states"] = used;
    return out;
}

CommandOutcome run_command(const RunConfig& config, SpectralCache& cache) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutcome out;
    switch (config.command) {
    case Command::Pattern: out = cmd_pattern(config, cache); break;
    case Command::Uncertainty: out = cmd_uncertainty(config, cache); break;
    case Command::Fisher: out = cmd_fisher(config, cache); break;
    case Command::Minima:
    case Command::Scaling: out = cmd_minima(config, cache); break;
    case Command::Distribution: out = cmd_distribution(config, cache); break;
    }
    out.table.sort_rows();
    auto& meta = out.table.metadata;
    meta["command"] = to_string(config.command);
    meta["engine_version"] = kEngineVersion;
    meta["config"] = config.to_json();
    meta["errors"] = out.errors;
    meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::optional<RunConfig> parse_cli(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Exact three-mode nonlinear interferometer: patterns, phase uncertainty, minima and scaling", "nli"};
    app.require_subcommand(1);

    struct Raw {
        std::string pump, n, tau, tau_grid, phi_grid, estimator = "ep", at, output, format, cache_dir;
        double delta = kDefaultDelta, threshold = 1e-5, fisher_step = kDefaultFisherStep;
        double tau_range_factor = kDefaultTauRangeFactor, low_gain_factor = 0.02, fit_n_min = 10.0,
               max_coherent_n = 100.0;
        int tau_count = kDefaultTauCount;
        std::optional<int> truncation_reference;
        std::optional<double> fisher_phi, tau_b;
        unsigned workers = 0;
        bool no_cache = false;
    } raw;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"pattern", "N_out and Var(N_out) over a phase grid"},
        {"uncertainty", "error-propagation, Fisher and parametric-approximation uncertainties over tau"},
        {"minima", "first and lowest uncertainty minima per N"},
        {"scaling", "minima per N plus a fixed-slope 1/N fit"},
        {"distribution", "internal signal photon-number distribution after amplifier A"},
        {"fisher", "classical Fisher information over tau"},
    };

    for (const auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--pump", raw.pump, "fock, coherent, or a comma list");
        sub->add_option("--n", raw.n, "mean pump photon number(s): a,b,c or start:stop:count");
        sub->add_option("--delta", raw.delta, "offset from the dark fringe")->capture_default_str();
        sub->add_option("--threshold", raw.threshold, "coherent-pump truncation threshold")->capture_default_str();
        sub->add_option("--truncation-reference", raw.truncation_reference, "reference sector (default round(N))");
        sub->add_option("--max-coherent-n", raw.max_coherent_n, "largest accepted coherent N")->capture_default_str();
        sub->add_option("--fisher-step", raw.fisher_step, "central-difference phase step")->capture_default_str();
        sub->add_option("--fisher-phi", raw.fisher_phi, "phase for the Fisher information (default pi+delta)");
        sub->add_option("--tau-b", raw.tau_b, "reserved: separate tau for amplifier B (unsupported)");
        sub->add_option("-o,--output", raw.output, "output file (default stdout)");
        sub->add_option("--format", raw.format, "csv or json (default from extension, else csv)");
        sub->add_option("-j,--workers", raw.workers, "worker threads (0 = all cores)");
        sub->add_flag("--no-cache", raw.no_cache, "bypass the on-disk spectral cache");
        sub->add_option("--cache-dir", raw.cache_dir, "spectral cache directory (overrides NLI_CACHE_DIR)");

        const std::string name = cmd.name;
        if (name == "pattern") {
            sub->add_option("--tau", raw.tau, "tau value(s) (default 0.2,0.5,0.9)");
            sub->add_option("--phi-grid", raw.phi_grid, "phase grid start:stop:count (default 0:2pi:361)");
        }
        if (name == "uncertainty" || name == "fisher" || name == "distribution")
            sub->add_option("--tau", raw.tau, "tau value(s)");
        if (name == "uncertainty" || name == "fisher")
            sub->add_option("--tau-grid", raw.tau_grid, "absolute tau grid start:stop:count");
        if (name != "pattern") {
            sub->add_option("--tau-range-factor", raw.tau_range_factor, "default tau range ends at factor*N^(-1/2)")
                ->capture_default_str();
            sub->add_option("--tau-count", raw.tau_count, "default tau grid points")->capture_default_str();
        }
        if (name == "uncertainty" || name == "fisher")
            sub->add_option("--low-gain-factor", raw.low_gain_factor, "default tau grid starts at factor*N^(-1/2)")
                ->capture_default_str();
        if (name == "minima" || name == "scaling" || name == "distribution") {
            sub->add_option("--estimator", raw.estimator, "ep or fisher")->capture_default_str();
        }
        if (name == "scaling") sub->add_option("--fit-n-min", raw.fit_n_min, "smallest N in the fit")->capture_default_str();
        if (name == "distribution") sub->add_option("--at", raw.at, "tau_min or tau_1 (scan first)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        app.exit(e, out, out);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig c;
    c.command = parse_command(app.get_subcommands().front()->get_name());
    if (raw.tau_b) throw UsageError("--tau-b: unbalanced amplifiers are not supported; both amplifiers share --tau");

    if (raw.pump.empty()) {
        c.pumps = c.command == Command::Pattern ? std::vector{PumpKind::Fock, PumpKind::Coherent}
                                                : std::vector{PumpKind::Fock};
    } else {
        c.pumps.clear();
        std::string_view rest = raw.pump;
        while (true) {
            const auto comma = rest.find(',');
            c.pumps.push_back(parse_pump_kind(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    if (!raw.n.empty()) {
        c.n_values = parse_value_list(raw.n);
        for (double& n : c.n_values)
            if (std::abs(n - std::round(n)) < 1e-9) n = std::round(n);
    } else if (c.command == Command::Pattern) {
        c.n_values = {5.0};
    }
    if (!raw.tau.empty()) c.tau_values = parse_value_list(raw.tau);
    if (!raw.tau_grid.empty()) c.tau_grid = GridSpec::parse(raw.tau_grid);
    if (!raw.phi_grid.empty()) c.phi_grid = GridSpec::parse(raw.phi_grid);
    c.delta = raw.delta;
    c.truncation_threshold = raw.threshold;
    c.truncation_reference = raw.truncation_reference;
    c.fisher_step = raw.fisher_step;
    c.fisher_phi = raw.fisher_phi;
    c.tau_range_factor = raw.tau_range_factor;
    c.tau_count = raw.tau_count;
    c.low_gain_factor = raw.low_gain_factor;
    c.estimator = parse_estimator(raw.estimator);
    c.distribution_at = raw.at;
    c.fit_n_min = raw.fit_n_min;
    c.max_coherent_n = raw.max_coherent_n;
    c.output_path = raw.output;
    c.workers = raw.workers;
    c.use_cache = !raw.no_cache;
    if (!raw.cache_dir.empty()) c.cache_dir = raw.cache_dir;

    if (raw.format == "json") {
        c.format = OutputFormat::Json;
    } else if (raw.format == "csv") {
        c.format = OutputFormat::Csv;
    } else if (raw.format.empty()) {
        c.format = std::filesystem::path(raw.output).extension() == ".json" ? OutputFormat::Json : OutputFormat::Csv;
    } else {
        throw UsageError("--format must be csv or json");
    }
    c.validate();
    return c;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config;
    try {
        config = parse_cli(argc, argv, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!config) return kExitOk;

    std::mutex warn_mutex;
    const WarningSink warn = [&](const std::string& msg) {
        std::lock_guard lock(warn_mutex);
        err << "warning: " << msg << '\n';
    };
    std::unique_ptr<SpectralCache> cache;
    if (auto dir = resolve_cache_dir(*config))
        cache = std::make_unique<SpectralCache>(*dir, warn);
    else
        cache = std::make_unique<SpectralCache>();

    CommandOutcome outcome;
    try {
        outcome = run_command(*config, *cache);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }

    const auto text = outcome.table.serialize(config->format);
    if (config->output_path.empty()) {
        out << text;
    } else {
        std::ofstream f(config->output_path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text)) {
            err << "error: cannot write " << config->output_path << '\n';
            return kExitNumerical;
        }
    }
    for (const auto& e : outcome.errors) err << "numerical failure: " << e << '\n';
    return outcome.errors.empty() ? kExitOk : kExitNumerical;
}

} // namespace nli
