#pragma once

#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "nli/nli_engine.hpp"

namespace nli {

/// Offset from the dark fringe at which error propagation is evaluated.
inline constexpr double kDefaultDelta = std::numbers::pi * 1e-9 / 2.0;
/// Phase step for central differences of the outcome probabilities.
inline constexpr double kDefaultFisherStep = 1e-6;
/// Default high-gain scan [N^(-1/2), factor N^(-1/2)]. Shorter ranges miss the
/// deep (N00N-like) minima of Fock pumps, so tau_min would collapse onto tau_1.
inline constexpr double kDefaultTauRangeFactor = 20.0;
inline constexpr int kDefaultTauCount = 2000;

/// Parametric-approximation internal photon number sinh^2(sqrt(N) tau).
[[nodiscard]] double pa_internal_photons(double n_mean, double tau);
/// [4 n (1 + n)]^(-1/2); throws UsageError for n <= 0.
[[nodiscard]] double pa_uncertainty(double n_int);
/// N^(-1/2).
[[nodiscard]] double shot_noise(double n_mean);

struct MetrologyOptions {
    double delta = kDefaultDelta;
    double fisher_step = kDefaultFisherStep;
    /// Phase at which the Fisher information is evaluated; pi + delta when unset.
    std::optional<double> fisher_phi;
    bool compute_fisher = true;
    TruncationRule truncation;

    void validate() const;
    /// Offset from pi of the Fisher evaluation phase.
    [[nodiscard]] double fisher_offset() const;
};

struct UncertaintyPoint {
    double n_mean = 0.0;
    double tau = 0.0;
    double delta = 0.0;
    double dphi_ep = 0.0;
    double dphi_fi = std::numeric_limits<double>::quiet_NaN(); ///< NaN unless requested
    double dphi_pa_formula = 0.0;
    double dphi_pa_adhoc = 0.0;
    double n_int = 0.0;
    double n_out = 0.0; ///< N_out at pi + delta
};

/// sqrt(Var N_out)|_(pi+delta) / (N_out|_(pi+2 delta) / (2 delta)), using N_out(pi) = 0.
/// Throws NumericalError("no phase response") if N_out(pi + 2 delta) vanishes.
[[nodiscard]] double dphi_error_propagation(const Interferometer& nli, double delta);

/// F = sum_k (dP_k/dphi)^2 / P_k with central differences of step `step`.
/// Outcomes with both P_k and |dP_k| below 1e-15 (or P_k <= 0) are skipped.
[[nodiscard]] double fisher_information(const Interferometer& nli, double phi, double step);
/// As above at phi = pi + offset, with the offset used exactly.
[[nodiscard]] double fisher_information_near_dark(const Interferometer& nli, double offset, double step);
[[nodiscard]] double fisher_information(const PumpSpec& pump, InteractionStrength tau, double phi,
                                        double step = kDefaultFisherStep, SpectralCache& cache = default_cache(),
                                        const TruncationRule& rule = {});

[[nodiscard]] UncertaintyPoint phase_uncertainty_ep(const PumpSpec& pump, InteractionStrength tau,
                                                    const MetrologyOptions& opts = {},
                                                    SpectralCache& cache = default_cache());

enum class Estimator { ErrorPropagation, Fisher };

/// Delta phi for one (pump, tau) with the chosen estimator.
[[nodiscard]] double phase_uncertainty(const PumpSpec& pump, double tau, Estimator estimator,
                                       const MetrologyOptions& opts = {}, SpectralCache& cache = default_cache());

/// Inclusive uniform grid.
struct TauGrid {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    [[nodiscard]] std::vector<double> points() const;
    [[nodiscard]] double at(int i) const;
    /// [N^(-1/2), factor N^(-1/2)] with `count` points.
    static TauGrid high_gain(double n_mean, double factor = kDefaultTauRangeFactor, int count = kDefaultTauCount);
};

struct MinimaReport {
    double n_mean = 0.0;
    TauGrid tau_grid;
    double tau_1 = 0.0;
    double dphi_at_tau_1 = 0.0;
    double tau_min = 0.0;
    double dphi_at_tau_min = 0.0;
};

/// Locates the first interior local minimum and the global minimum of
/// `curve` on the grid, each refined by golden-section search inside its
/// bracketing grid interval to relative width 1e-4. Grid evaluations run on
/// `workers` threads. Throws NumericalError if no interior minimum exists.
[[nodiscard]] MinimaReport scan_minima(const std::function<double(double)>& curve, const TauGrid& grid,
                                       double n_mean, unsigned workers = 1);

/// Same scan over Delta phi of `pump`; requires grid.start >= N^(-1/2) and count >= 100.
[[nodiscard]] MinimaReport scan_minima(const PumpSpec& pump, const TauGrid& grid, Estimator estimator,
                                       const MetrologyOptions& opts = {}, SpectralCache& cache = default_cache(),
                                       unsigned workers = 1);

/// Golden-section minimization of f on [lo, hi] until (hi - lo) <= rel_width * midpoint.
[[nodiscard]] std::pair<double, double> golden_section_min(const std::function<double(double)>& f, double lo,
                                                           double hi, double rel_width = 1e-4);

struct ScalingFit {
    std::vector<std::pair<double, double>> points; ///< (N, Delta phi) actually used
    double exponent_fixed = -1.0;
    double prefactor = 0.0; ///< c in Delta phi ~ c / N
    double fit_n_min = 10.0;
};

/// Least squares of log(dphi) = log(c) - log(N) over points with N >= fit_n_min.
/// Needs at least three qualifying points (NumericalError otherwise).
[[nodiscard]] ScalingFit fit_heisenberg(const std::vector<std::pair<double, double>>& points,
                                        double fit_n_min = 10.0);

/// Free-slope log-log fit, dphi ~ prefactor * N^exponent. Diagnostics only.
struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
};
[[nodiscard]] PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                                        double fit_n_min = 10.0);

} // namespace nli
