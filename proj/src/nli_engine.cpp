#include "nli/nli_engine.hpp"

#include <cmath>
#include <numbers>

namespace nli {

Moments moments(std::span<const double> distribution) {
    Moments m;
    for (std::size_t k = 0; k < distribution.size(); ++k) m.mean += static_cast<double>(k) * distribution[k];
    for (std::size_t k = 0; k < distribution.size(); ++k) {
        const double d = static_cast<double>(k) - m.mean;
        m.var += d * d * distribution[k];
    }
    return m;
}

Interferometer::Interferometer(const PumpSpec& pump, InteractionStrength tau, SpectralCache& cache,
                               const TruncationRule& rule)
    : pump_(pump), tau_(tau.value()), ensemble_in_(expand(pump, rule)) {
    sectors_.reserve(ensemble_in_.entries.size());
    for (const auto& e : ensemble_in_.entries) {
        auto spectral = cache.get(e.sector.n_total);
        auto after_a = evolve(*spectral, tau_, e.state.coeffs);
        sectors_.push_back({e.weight / ensemble_in_.weights_sum, std::move(spectral), e.state.coeffs,
                            std::move(after_a)});
        max_sector_ = std::max(max_sector_, e.sector.n_total);
    }
    for (const auto& s : sectors_)
        for (Eigen::Index nu = 1; nu < s.after_a.size(); ++nu)
            n_int_ += s.weight * static_cast<double>(nu) * std::norm(s.after_a(nu));
}

InternalState Interferometer::internal() const {
    InternalState st;
    st.tau = tau_;
    st.n_int_mean = n_int_;
    st.distribution_int.assign(static_cast<std::size_t>(max_sector_) + 1, 0.0);
    st.ensemble_A.weights_sum = ensemble_in_.weights_sum;
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        const auto& s = sectors_[i];
        const auto& in = ensemble_in_.entries[i];
        st.ensemble_A.entries.push_back({in.sector, in.weight, {in.sector, s.after_a}});
        for (Eigen::Index nu = 0; nu < s.after_a.size(); ++nu)
            st.distribution_int[static_cast<std::size_t>(nu)] += s.weight * std::norm(s.after_a(nu));
    }
    return st;
}

double Interferometer::dark_offset(double phi) {
    return std::remainder(phi - std::numbers::pi, 2.0 * std::numbers::pi);
}

ComplexVectorX<double> Interferometer::run_b(const Sector& s, double eps) const {
    const Eigen::Index d = s.after_a.size();

    // w = (exp(-i nu eps) - 1) a, with exp(-ix) - 1 = -2i sin(x/2) exp(-ix/2).
    ComplexVectorX<double> w(d);
    for (Eigen::Index nu = 0; nu < d; ++nu) {
        const double half = 0.5 * static_cast<double>(nu) * eps;
        w(nu) = std::complex<double>(0.0, -2.0 * std::sin(half)) * std::polar(1.0, -half) * s.after_a(nu);
    }
    ComplexVectorX<double> out = evolve(*s.spectral, -tau_, w);
    out += s.input;
    apply_gauge(out, eps);
    return out;
}

OutputStatistics Interferometer::statistics(double phi) const {
    auto st = statistics_near_dark(dark_offset(phi));
    st.phi = phi;
    return st;
}

OutputStatistics Interferometer::statistics_near_dark(double offset) const {
    OutputStatistics st;
    st.phi = std::numbers::pi + offset;
    st.distribution.assign(static_cast<std::size_t>(max_sector_) + 1, 0.0);
    for (const auto& s : sectors_) {
        const auto out = run_b(s, offset);
        for (Eigen::Index k = 0; k < out.size(); ++k)
            st.distribution[static_cast<std::size_t>(k)] += s.weight * std::norm(out(k));
    }
    const auto m = moments(st.distribution);
    st.n_out_mean = m.mean;
    st.n_out_var = m.var;
    return st;
}

NLIResult Interferometer::output(double phi) const {
    NLIResult r;
    static_cast<OutputStatistics&>(r) = statistics(phi);
    r.tau = tau_;
    r.ensemble_out.weights_sum = ensemble_in_.weights_sum;
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        const auto& in = ensemble_in_.entries[i];
        r.ensemble_out.entries.push_back({in.sector, in.weight, {in.sector, run_b(sectors_[i], dark_offset(phi))}});
    }
    return r;
}

InternalState run_amplifier_a(const PumpSpec& pump, InteractionStrength tau, SpectralCache& cache,
                              const TruncationRule& rule) {
    return Interferometer(pump, tau, cache, rule).internal();
}

NLIResult run_nli(const PumpSpec& pump, InteractionStrength tau, double phi, SpectralCache& cache,
                  const TruncationRule& rule) {
    return Interferometer(pump, tau, cache, rule).output(phi);
}

std::vector<NLIResult> interference_pattern(const PumpSpec& pump, InteractionStrength tau,
                                            std::span<const double> phi_grid, SpectralCache& cache,
                                            const TruncationRule& rule) {
    if (phi_grid.empty()) throw UsageError("interference_pattern: empty phase grid");
    const Interferometer nli(pump, tau, cache, rule);
    std::vector<NLIResult> out;
    out.reserve(phi_grid.size());
    for (double phi : phi_grid) out.push_back(nli.output(phi));
    return out;
}

} // namespace nli
