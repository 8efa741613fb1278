#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nli/fock_core.hpp"
#include "nli/pump_sources.hpp"
#include "nli/spectral_cache.hpp"

namespace nli {

/// Photon statistics of the output signal (equivalently idler) mode.
struct OutputStatistics {
    double phi = 0.0;
    double n_out_mean = 0.0;
    double n_out_var = 0.0;
    std::vector<double> distribution; ///< P(N_out = k), k = 0..max retained sector
};

struct NLIResult : OutputStatistics {
    double tau = 0.0;
    SectorEnsemble ensemble_out;
};

/// State between the amplifiers.
struct InternalState {
    double tau = 0.0;
    SectorEnsemble ensemble_A;
    double n_int_mean = 0.0;
    std::vector<double> distribution_int; ///< P(nu) summed over sectors
};

/// Mean and variance of a photon-number distribution (two-pass, variance >= 0).
struct Moments {
    double mean = 0.0;
    double var = 0.0;
};
[[nodiscard]] Moments moments(std::span<const double> distribution);

/// Balanced interferometer: amplifier A with theta = 0, phase phi, amplifier
/// B with theta = phi, both with the same tau. Amplifier A is evaluated once at
/// construction; each output() call only runs amplifier B.
///
/// Amplifier B is evaluated relative to the dark fringe: with eps = phi - pi
/// and U = exp(-i tau M(0)), D(pi) U D(pi)^dagger = U^dagger, so
///   c_out = D(eps) [c_in + U^dagger ((exp(-i nu eps) - 1) * U c_in)].
/// The photon-carrying components are then O(eps) quantities computed without
/// cancelling O(1) terms, which keeps full relative precision near phi = pi.
class Interferometer {
public:
    Interferometer(const PumpSpec& pump, InteractionStrength tau, SpectralCache& cache = default_cache(),
                   const TruncationRule& rule = {});

    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const PumpSpec& pump() const noexcept { return pump_; }

    [[nodiscard]] InternalState internal() const;
    [[nodiscard]] double n_int() const noexcept { return n_int_; }

    [[nodiscard]] OutputStatistics statistics(double phi) const;
    /// Statistics at phi = pi + offset, with the offset used exactly (no
    /// rounding of pi + offset to a double).
    [[nodiscard]] OutputStatistics statistics_near_dark(double offset) const;
    [[nodiscard]] NLIResult output(double phi) const;

    /// phi - pi wrapped to [-pi, pi].
    [[nodiscard]] static double dark_offset(double phi);

private:
    struct Sector {
        double weight; ///< normalized by the retained weight sum
        std::shared_ptr<const Spectral> spectral;
        ComplexVectorX<double> input;
        ComplexVectorX<double> after_a;
    };

    [[nodiscard]] ComplexVectorX<double> run_b(const Sector& s, double offset) const;

    PumpSpec pump_;
    double tau_;
    SectorEnsemble ensemble_in_;
    std::vector<Sector> sectors_;
    int max_sector_ = 0;
    double n_int_ = 0.0;
};

[[nodiscard]] InternalState run_amplifier_a(const PumpSpec& pump, InteractionStrength tau,
                                            SpectralCache& cache = default_cache(), const TruncationRule& rule = {});

[[nodiscard]] NLIResult run_nli(const PumpSpec& pump, InteractionStrength tau, double phi,
                                SpectralCache& cache = default_cache(), const TruncationRule& rule = {});

/// One result per grid phase; amplifier A is shared across the grid.
[[nodiscard]] std::vector<NLIResult> interference_pattern(const PumpSpec& pump, InteractionStrength tau,
                                                          std::span<const double> phi_grid,
                                                          SpectralCache& cache = default_cache(),
                                                          const TruncationRule& rule = {});

} // namespace nli
