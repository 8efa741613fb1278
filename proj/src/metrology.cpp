#include "nli/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nli/parallel.hpp"

namespace nli {

double pa_internal_photons(double n_mean, double tau) {
    if (n_mean < 0.0) throw UsageError("pa_internal_photons: negative photon number");
    const double s = std::sinh(std::sqrt(n_mean) * tau);
    return s * s;
}

double pa_uncertainty(double n_int) {
    if (!(n_int > 0.0))
        throw UsageError("parametric-approximation uncertainty undefined for N_int = " + std::to_string(n_int));
    return 1.0 / std::sqrt(4.0 * n_int * (1.0 + n_int));
}

double shot_noise(double n_mean) {
    if (!(n_mean > 0.0)) throw UsageError("shot_noise: photon number must be > 0");
    return 1.0 / std::sqrt(n_mean);
}

void MetrologyOptions::validate() const {
    if (!(delta > 0.0)) throw UsageError("delta must be > 0");
    if (!(fisher_step > 0.0)) throw UsageError("fisher step must be > 0");
    if (!(truncation.threshold > 0.0)) throw UsageError("truncation threshold must be > 0");
}

double dphi_error_propagation(const Interferometer& nli, double delta) {
    if (!(delta > 0.0)) throw UsageError("delta must be > 0");
    const double var = nli.statistics_near_dark(delta).n_out_var;
    const double slope = nli.statistics_near_dark(2.0 * delta).n_out_mean / (2.0 * delta);
    if (!(slope > 0.0))
        throw NumericalError("no phase response (N = " + std::to_string(nli.pump().n_mean) +
                             ", tau = " + std::to_string(nli.tau()) + ")");
    return std::sqrt(var) / slope;
}

double MetrologyOptions::fisher_offset() const {
    return fisher_phi ? Interferometer::dark_offset(*fisher_phi) : delta;
}

double fisher_information(const Interferometer& nli, double phi, double step) {
    return fisher_information_near_dark(nli, Interferometer::dark_offset(phi), step);
}

double fisher_information_near_dark(const Interferometer& nli, double offset, double step) {
    if (!(step > 0.0)) throw UsageError("fisher step must be > 0");
    const auto p = nli.statistics_near_dark(offset).distribution;
    const auto p_plus = nli.statistics_near_dark(offset + step).distribution;
    const auto p_minus = nli.statistics_near_dark(offset - step).distribution;
    double f = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double dp = (p_plus[k] - p_minus[k]) / (2.0 * step);
        if (p[k] <= 0.0 || (p[k] < 1e-15 && std::abs(dp) < 1e-15)) continue;
        f += dp * dp / p[k];
    }
    return f;
}

double fisher_information(const PumpSpec& pump, InteractionStrength tau, double phi, double step,
                          SpectralCache& cache, const TruncationRule& rule) {
    return fisher_information(Interferometer(pump, tau, cache, rule), phi, step);
}

namespace {

double dphi_fisher(const Interferometer& nli, const MetrologyOptions& opts) {
    const double f = fisher_information_near_dark(nli, opts.fisher_offset(), opts.fisher_step);
    if (!(f > 0.0))
        throw NumericalError("no phase response in Fisher information (N = " + std::to_string(nli.pump().n_mean) +
                             ", tau = " + std::to_string(nli.tau()) + ")");
    return 1.0 / std::sqrt(f);
}

} // namespace

UncertaintyPoint phase_uncertainty_ep(const PumpSpec& pump, InteractionStrength tau, const MetrologyOptions& opts,
                                      SpectralCache& cache) {
    opts.validate();
    const Interferometer nli(pump, tau, cache, opts.truncation);

    UncertaintyPoint pt;
    pt.n_mean = pump.n_mean;
    pt.tau = tau.value();
    pt.delta = opts.delta;
    pt.dphi_ep = dphi_error_propagation(nli, opts.delta);
    pt.n_int = nli.n_int();
    pt.n_out = nli.statistics_near_dark(opts.delta).n_out_mean;
    pt.dphi_pa_formula = pa_uncertainty(pa_internal_photons(pump.n_mean, tau.value()));
    pt.dphi_pa_adhoc = pa_uncertainty(pt.n_int);
    if (opts.compute_fisher) pt.dphi_fi = dphi_fisher(nli, opts);
    return pt;
}

double phase_uncertainty(const PumpSpec& pump, double tau, Estimator estimator, const MetrologyOptions& opts,
                         SpectralCache& cache) {
    const Interferometer nli(pump, InteractionStrength(tau), cache, opts.truncation);
    return estimator == Estimator::Fisher ? dphi_fisher(nli, opts) : dphi_error_propagation(nli, opts.delta);
}

double TauGrid::at(int i) const {
    if (i == count - 1) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<double> TauGrid::points() const {
    std::vector<double> pts(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) pts[static_cast<std::size_t>(i)] = at(i);
    return pts;
}

TauGrid TauGrid::high_gain(double n_mean, double factor, int count) {
    const double edge = 1.0 / std::sqrt(n_mean);
    return {edge, factor * edge, count};
}

std::pair<double, double> golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                             double rel_width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while ((hi - lo) > rel_width * 0.5 * std::abs(hi + lo)) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

MinimaReport scan_minima(const std::function<double(double)>& curve, const TauGrid& grid, double n_mean,
                         unsigned workers) {
    if (grid.count < 3 || !(grid.start < grid.stop)) throw UsageError("scan_minima: invalid tau grid");
    const auto taus = grid.points();
    std::vector<double> values(taus.size());
    parallel_for(taus.size(), workers, [&](std::size_t i) { values[i] = curve(taus[i]); });

    std::size_t first = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] < values[i - 1] && values[i] < values[i + 1]) {
            first = i;
            break;
        }
    }
    if (first == 0)
        throw NumericalError("no interior local minimum of the phase uncertainty in tau range [" +
                             std::to_string(grid.start) + ", " + std::to_string(grid.stop) +
                             "]; try a larger tau stop");

    // Refined value never exceeds the grid value it started from.
    auto refine = [&](std::size_t i) -> std::pair<double, double> {
        if (i == 0 || i + 1 == values.size()) return {taus[i], values[i]};
        auto best = golden_section_min(curve, taus[i - 1], taus[i + 1]);
        if (values[i] <= best.second) best = {taus[i], values[i]};
        return best;
    };

    MinimaReport rep;
    rep.n_mean = n_mean;
    rep.tau_grid = grid;
    std::tie(rep.tau_1, rep.dphi_at_tau_1) = refine(first);

    const auto global = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    if (global == first) {
        rep.tau_min = rep.tau_1;
        rep.dphi_at_tau_min = rep.dphi_at_tau_1;
    } else {
        std::tie(rep.tau_min, rep.dphi_at_tau_min) = refine(global);
        if (rep.dphi_at_tau_1 < rep.dphi_at_tau_min) {
            rep.tau_min = rep.tau_1;
            rep.dphi_at_tau_min = rep.dphi_at_tau_1;
        }
    }
    return rep;
}

MinimaReport scan_minima(const PumpSpec& pump, const TauGrid& grid, Estimator estimator,
                         const MetrologyOptions& opts, SpectralCache& cache, unsigned workers) {
    pump.validate();
    opts.validate();
    if (!(pump.n_mean > 0.0)) throw UsageError("scan_minima: pump photon number must be > 0");
    if (grid.count < 100) throw UsageError("scan_minima: tau grid needs at least 100 points");
    if (grid.start < (1.0 - 1e-12) / std::sqrt(pump.n_mean))
        throw UsageError("scan_minima: tau grid must start in the high-gain region, tau >= N^(-1/2)");
    MetrologyOptions o = opts;
    o.compute_fisher = false;
    const auto curve = [&](double tau) { return phase_uncertainty(pump, tau, estimator, o, cache); };
    return scan_minima(curve, grid, pump.n_mean, workers);
}

namespace {

std::vector<std::pair<double, double>> qualifying(const std::vector<std::pair<double, double>>& points,
                                                  double fit_n_min) {
    std::vector<std::pair<double, double>> used;
    for (const auto& p : points)
        if (p.first >= fit_n_min && p.first > 0.0 && p.second > 0.0) used.push_back(p);
    if (used.size() < 3)
        throw NumericalError("Heisenberg fit needs at least 3 points with N >= " + std::to_string(fit_n_min) +
                             ", got " + std::to_string(used.size()));
    return used;
}

} // namespace

ScalingFit fit_heisenberg(const std::vector<std::pair<double, double>>& points, double fit_n_min) {
    ScalingFit fit;
    fit.fit_n_min = fit_n_min;
    fit.points = qualifying(points, fit_n_min);
    double sum = 0.0;
    for (const auto& [n, dphi] : fit.points) sum += std::log(dphi) + std::log(n);
    fit.prefactor = std::exp(sum / static_cast<double>(fit.points.size()));
    return fit;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points, double fit_n_min) {
    const auto used = qualifying(points, fit_n_min);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, dphi] : used) {
        const double x = std::log(n), y = std::log(dphi);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(used.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return {slope, std::exp((sy - slope * sx) / m)};
}

} // namespace nli
