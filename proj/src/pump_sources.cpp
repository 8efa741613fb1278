#include "nli/pump_sources.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nli {

std::string_view to_string(PumpKind kind) noexcept {
    return kind == PumpKind::Fock ? "fock" : "coherent";
}

PumpKind parse_pump_kind(std::string_view text) {
    if (text == "fock") return PumpKind::Fock;
    if (text == "coherent") return PumpKind::Coherent;
    throw UsageError("unknown pump kind '" + std::string(text) + "' (expected fock or coherent)");
}

void PumpSpec::validate() const {
    if (!std::isfinite(n_mean) || n_mean < 0.0)
        throw UsageError("pump photon number must be finite and >= 0, got " + std::to_string(n_mean));
    if (kind == PumpKind::Fock && n_mean != std::floor(n_mean))
        throw UsageError("Fock pump requires an integer photon number, got " + std::to_string(n_mean));
    if (!std::isfinite(alpha_phase)) throw UsageError("pump phase must be finite");
}

int SectorEnsemble::max_sector() const {
    int m = 0;
    for (const auto& e : entries) m = std::max(m, e.sector.n_total);
    return m;
}

double poisson_weight(double n_mean, int n) {
    if (n < 0) return 0.0;
    if (n_mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-n_mean + n * std::log(n_mean) - std::lgamma(n + 1.0));
}

SectorEnsemble expand(const PumpSpec& pump, const TruncationRule& rule) {
    pump.validate();
    if (!(rule.threshold > 0.0) || !(rule.threshold < 1.0))
        throw UsageError("truncation threshold must lie in (0, 1), got " + std::to_string(rule.threshold));

    SectorEnsemble ens;
    if (pump.kind == PumpKind::Fock) {
        const FockSector s(static_cast<int>(pump.n_mean));
        ens.entries.push_back({s, 1.0, StateVector<double>::ground(s)});
        ens.weights_sum = 1.0;
        return ens;
    }

    const int ref = rule.reference_sector.value_or(static_cast<int>(std::lround(pump.n_mean)));
    const double cut = rule.threshold * poisson_weight(pump.n_mean, ref);
    if (!(cut > 0.0))
        throw UsageError("truncation reference sector " + std::to_string(ref) + " has zero weight");

    // The Poisson weights are unimodal, so the retained set is one interval.
    // Start from the mode in case the reference sector itself is below the cut.
    const int mode = static_cast<int>(std::floor(pump.n_mean));
    int lo = mode, hi = mode;
    while (lo > 0 && poisson_weight(pump.n_mean, lo - 1) >= cut) --lo;
    while (poisson_weight(pump.n_mean, hi + 1) >= cut) ++hi;

    for (int n = lo; n <= hi; ++n) {
        const double w = poisson_weight(pump.n_mean, n);
        const FockSector s(n);
        ens.entries.push_back({s, w, StateVector<double>::ground(s, n * pump.alpha_phase)});
        ens.weights_sum += w;
    }
    return ens;
}

} // namespace nli
