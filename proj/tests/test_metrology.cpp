#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nli/metrology.hpp"

using namespace nli;

namespace {

constexpr double kPi = std::numbers::pi;

MetrologyOptions ep_only() {
    MetrologyOptions o;
    o.compute_fisher = false;
    return o;
}

} // namespace

TEST_CASE("parametric-approximation formulas") {
    CHECK(pa_internal_photons(4.0, 0.5) == doctest::Approx(std::pow(std::sinh(1.0), 2)));
    CHECK(pa_internal_photons(4.0, 0.0) == 0.0);
    CHECK(pa_uncertainty(1.0) == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK_THROWS_AS((void)pa_uncertainty(0.0), UsageError);
    CHECK(shot_noise(25.0) == doctest::Approx(0.2));
}

TEST_CASE("options validation") {
    MetrologyOptions o;
    o.delta = 0.0;
    CHECK_THROWS_AS(o.validate(), UsageError);
    o = {};
    o.fisher_step = -1.0;
    CHECK_THROWS_AS(o.validate(), UsageError);
    o = {};
    CHECK(o.fisher_offset() == o.delta);
    o.fisher_phi = 2.0;
    CHECK(o.fisher_offset() == doctest::Approx(2.0 - kPi));
}

TEST_CASE("N = 1: both estimators give 1/|sin 2 tau|") {
    for (double t : {0.2, kPi / 4, 0.6, 1.2}) {
        CAPTURE(t);
        const auto pt = phase_uncertainty_ep(PumpSpec::fock(1), InteractionStrength(t));
        const double expected = 1.0 / std::abs(std::sin(2 * t));
        CHECK(std::abs(pt.dphi_ep / expected - 1.0) < 1e-6);
        CHECK(std::abs(pt.dphi_fi / expected - 1.0) < 1e-6);
    }
    const auto heis = phase_uncertainty_ep(PumpSpec::fock(1), InteractionStrength(kPi / 4));
    CHECK(heis.dphi_ep == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("no phase response at tau = 0") {
    CHECK_THROWS_AS((void)phase_uncertainty(PumpSpec::fock(5), 0.0, Estimator::ErrorPropagation), NumericalError);
}

TEST_CASE("low gain agrees with the parametric approximation") {
    for (int n : {5, 50})
        for (const auto& pump : {PumpSpec::fock(n), PumpSpec::coherent(n)})
            for (double g : {0.05, 0.15, 0.3}) {
                const auto pt = phase_uncertainty_ep(pump, InteractionStrength(g / std::sqrt(n)), ep_only());
                CHECK(std::abs(pt.dphi_ep / pt.dphi_pa_formula - 1.0) < 0.05);
            }
}

TEST_CASE("depletion shows up at moderate gain") {
    const auto pt = phase_uncertainty_ep(PumpSpec::fock(5), InteractionStrength(1.5 / std::sqrt(5.0)), ep_only());
    CHECK(std::abs(pt.dphi_ep / pt.dphi_pa_formula - 1.0) > 0.10);
}

TEST_CASE("Cramer-Rao ordering and low-gain agreement") {
    const auto pump = PumpSpec::coherent(5.0);
    for (double t : {0.03, 0.1, 0.3, 0.7, 1.2, 2.0, 3.5}) {
        CAPTURE(t);
        const auto pt = phase_uncertainty_ep(pump, InteractionStrength(t));
        CHECK(pt.dphi_fi <= pt.dphi_ep * (1 + 1e-3));
        if (t * std::sqrt(5.0) <= 0.3) CHECK(std::abs(pt.dphi_fi / pt.dphi_ep - 1.0) < 0.02);
    }
}

TEST_CASE("delta robustness") {
    for (double t : {0.05, 0.4, 1.1}) {
        const double a = phase_uncertainty(PumpSpec::fock(10), t, Estimator::ErrorPropagation);
        MetrologyOptions half;
        half.delta = kDefaultDelta / 2;
        const double b = phase_uncertainty(PumpSpec::fock(10), t, Estimator::ErrorPropagation, half);
        CHECK(std::abs(a / b - 1.0) < 1e-4);
    }
}

TEST_CASE("tau grids") {
    const TauGrid g{1.0, 2.0, 11};
    CHECK(g.points().size() == 11);
    CHECK(g.at(0) == 1.0);
    CHECK(g.at(10) == 2.0);
    CHECK(g.at(5) == doctest::Approx(1.5));
    const auto hg = TauGrid::high_gain(25.0);
    CHECK(hg.start == doctest::Approx(0.2));
    CHECK(hg.stop == doctest::Approx(0.2 * kDefaultTauRangeFactor));
    CHECK(hg.count == kDefaultTauCount);
}

TEST_CASE("golden section search") {
    const auto [x, fx] = golden_section_min([](double t) { return (t - 1.3) * (t - 1.3) + 2.0; }, 0.5, 3.0);
    CHECK(x == doctest::Approx(1.3).epsilon(1e-4));
    CHECK(fx == doctest::Approx(2.0));
}

TEST_CASE("scan_minima on injected curves") {
    const TauGrid grid{0.1, 10.0, 400};
    SUBCASE("monotone curve has no interior minimum") {
        CHECK_THROWS_AS((void)scan_minima([](double t) { return 1.0 / t; }, grid, 1.0), NumericalError);
    }
    SUBCASE("first and global minima are distinguished") {
        // Local minimum near 2 (depth 0.5), global near 7 (depth 0.1).
        auto f = [](double t) {
            return 1.0 - 0.5 * std::exp(-std::pow(t - 2.0, 2)) - 0.9 * std::exp(-std::pow(t - 7.0, 2));
        };
        const auto r = scan_minima(f, grid, 4.0, 3);
        CHECK(r.tau_1 == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(r.tau_min == doctest::Approx(7.0).epsilon(1e-3));
        CHECK(r.dphi_at_tau_min < r.dphi_at_tau_1);
        CHECK(r.n_mean == 4.0);
    }
    SUBCASE("worker count does not change the result") {
        auto f = [](double t) { return 2.0 + std::cos(3 * t) / (1 + t); };
        const auto a = scan_minima(f, grid, 1.0, 1);
        const auto b = scan_minima(f, grid, 1.0, 4);
        CHECK(a.tau_1 == b.tau_1);
        CHECK(a.tau_min == b.tau_min);
    }
}

TEST_CASE("scan_minima input checks") {
    CHECK_THROWS_AS((void)scan_minima(PumpSpec::fock(25), TauGrid{0.1, 2.0, 500}, Estimator::ErrorPropagation),
                    UsageError);
    CHECK_THROWS_AS((void)scan_minima(PumpSpec::fock(25), TauGrid{0.2, 2.0, 50}, Estimator::ErrorPropagation),
                    UsageError);
}

TEST_CASE("Fock first minimum beats shot noise") {
    const auto r = scan_minima(PumpSpec::fock(10), TauGrid::high_gain(10.0, 6.0, 600), Estimator::ErrorPropagation);
    CHECK(r.tau_1 == doctest::Approx(0.605).epsilon(2e-3));
    CHECK(r.dphi_at_tau_1 < shot_noise(10.0));
    CHECK(r.dphi_at_tau_min <= r.dphi_at_tau_1);
}

TEST_CASE("odd Fock states reach a lower deep minimum") {
    const auto r9 = scan_minima(PumpSpec::fock(9), TauGrid::high_gain(9.0), Estimator::ErrorPropagation);
    const auto r10 = scan_minima(PumpSpec::fock(10), TauGrid::high_gain(10.0), Estimator::ErrorPropagation);
    CHECK(r9.tau_min == doctest::Approx(4.4455).epsilon(1e-3));
    CHECK(r10.tau_min == doctest::Approx(4.6890).epsilon(1e-3));
    CHECK(r9.dphi_at_tau_min < r10.dphi_at_tau_min);
}

TEST_CASE("Heisenberg fit") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {5.0, 10.0, 20.0, 40.0, 80.0}) pts.emplace_back(n, 1.7 / n);
    const auto fit = fit_heisenberg(pts);
    CHECK(fit.prefactor == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(fit.points.size() == 4);
    const auto free = fit_power_law(pts);
    CHECK(free.exponent == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(free.prefactor == doctest::Approx(1.7).epsilon(1e-10));

    const std::vector<std::pair<double, double>> too_few{{10.0, 0.2}, {20.0, 0.1}, {5.0, 0.3}};
    CHECK_THROWS_AS((void)fit_heisenberg(too_few), NumericalError);
}
