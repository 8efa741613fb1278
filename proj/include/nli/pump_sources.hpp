#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nli/fock_core.hpp"

namespace nli {

enum class PumpKind { Fock, Coherent };

[[nodiscard]] std::string_view to_string(PumpKind kind) noexcept;
/// Accepts "fock" or "coherent"; throws UsageError otherwise.
[[nodiscard]] PumpKind parse_pump_kind(std::string_view text);

/// Input pump; signal and idler always start in vacuum. For a coherent pump
/// n_mean = |alpha|^2 and alpha_phase = arg(alpha).
struct PumpSpec {
    PumpKind kind = PumpKind::Fock;
    double n_mean = 0.0;
    double alpha_phase = 0.0;

    static PumpSpec fock(int n) { return {PumpKind::Fock, static_cast<double>(n), 0.0}; }
    static PumpSpec coherent(double n_mean, double alpha_phase = 0.0) {
        return {PumpKind::Coherent, n_mean, alpha_phase};
    }

    /// Throws UsageError for negative N or a non-integer Fock N.
    void validate() const;
};

/// Coherent-pump sectors are kept while their Poisson weight is at least
/// `threshold` times the weight of the reference sector (round(N) unless overridden).
struct TruncationRule {
    double threshold = 1e-5;
    std::optional<int> reference_sector;
};

struct SectorEntry {
    FockSector sector;
    double weight = 0.0;
    StateVector<double> state;
};

struct SectorEnsemble {
    std::vector<SectorEntry> entries;
    double weights_sum = 0.0;

    [[nodiscard]] int max_sector() const;
};

/// Poisson probability exp(-N) N^n / n!, evaluated in log space.
[[nodiscard]] double poisson_weight(double n_mean, int n);

/// Expands the pump over photon-number sectors. Entries are ordered by
/// increasing n_total and form a contiguous range.
[[nodiscard]] SectorEnsemble expand(const PumpSpec& pump, const TruncationRule& rule = {});

} // namespace nli
