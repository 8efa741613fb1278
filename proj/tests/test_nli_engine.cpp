#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nli/nli_engine.hpp"
#include "support/ode_oracle.hpp"

using namespace nli;
using nli::testing::mean_of;
using nli::testing::oracle_output_distribution;

namespace {

constexpr double kPi = std::numbers::pi;

InteractionStrength tau_of(double t) { return InteractionStrength(t); }

std::vector<PumpSpec> both_pumps(int n) { return {PumpSpec::fock(n), PumpSpec::coherent(n)}; }

std::pair<int, int> top_two(const std::vector<double>& p) {
    std::vector<int> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](int a, int b) { return p[a] > p[b]; });
    return {std::min(idx[0], idx[1]), std::max(idx[0], idx[1])};
}

} // namespace

TEST_CASE("moments of a distribution") {
    const std::vector<double> p{0.25, 0.5, 0.25};
    const auto m = moments(p);
    CHECK(m.mean == doctest::Approx(1.0));
    CHECK(m.var == doctest::Approx(0.5));
    const std::vector<double> delta{0.0, 0.0, 1.0};
    CHECK(moments(delta).var == 0.0);
}

TEST_CASE("dark_offset wraps to [-pi, pi]") {
    CHECK(Interferometer::dark_offset(kPi) == 0.0);
    CHECK(Interferometer::dark_offset(0.0) == doctest::Approx(-kPi));
    CHECK(Interferometer::dark_offset(3 * kPi + 0.1) == doctest::Approx(0.1));
}

TEST_CASE("amplifier A: no interaction, no photons") {
    for (const auto& pump : both_pumps(5)) {
        const auto st = run_amplifier_a(pump, tau_of(0.0));
        CHECK(st.n_int_mean == 0.0);
        CHECK(st.distribution_int[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("amplifier A: N = 1 gives sin^2 tau") {
    for (double t : {0.1, 0.6, 1.3, 2.9}) CHECK(run_amplifier_a(PumpSpec::fock(1), tau_of(t)).n_int_mean ==
                                                doctest::Approx(std::sin(t) * std::sin(t)).epsilon(1e-13));
}

TEST_CASE("amplifier A: internal distribution sums to one") {
    for (const auto& pump : both_pumps(20)) {
        const auto st = run_amplifier_a(pump, tau_of(0.8));
        const double total = std::accumulate(st.distribution_int.begin(), st.distribution_int.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("internal distribution has N00N-like peaks at large tau") {
    // Deep minima of Delta phi found by a long scan; see test_metrology for the scan itself.
    const auto odd = run_amplifier_a(PumpSpec::fock(9), tau_of(4.4455)).distribution_int;
    CHECK(top_two(odd) == std::pair{0, 9});
    const double smaller_peak = std::min(odd[0], odd[9]);
    for (int nu : {2, 4, 6, 8}) CHECK(odd[nu] < 0.25 * smaller_peak);

    const auto even = run_amplifier_a(PumpSpec::fock(10), tau_of(4.6890)).distribution_int;
    CHECK(top_two(even) == std::pair{1, 10});
}

TEST_CASE("dark fringe vanishes at phi = pi") {
    for (int n : {1, 5, 50})
        for (const auto& pump : both_pumps(n))
            for (double t : {0.2, 0.5, 0.9}) {
                const Interferometer nli(pump, tau_of(t));
                const auto s = nli.statistics(kPi);
                CHECK(s.n_out_mean < 1e-10);
                CHECK(s.n_out_var < 1e-10);
            }
}

TEST_CASE("N = 1 output closed form") {
    for (double t : {0.15, std::numbers::pi / 4, 1.1})
        for (double phi : {0.0, 0.7, 2.0, kPi - 1e-3, 4.5}) {
            const double c = std::cos(phi / 2);
            const double expected = std::pow(std::sin(2 * t) * c, 2);
            CHECK(run_nli(PumpSpec::fock(1), tau_of(t), phi).n_out_mean == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("pattern symmetries: 2 pi periodicity and reflection about pi") {
    for (const auto& pump : both_pumps(5)) {
        const Interferometer nli(pump, tau_of(0.5));
        for (double phi : {0.1, 1.0, 2.2, 3.0}) {
            const double a = nli.statistics(phi).n_out_mean;
            CHECK(std::abs(a - nli.statistics(phi + 2 * kPi).n_out_mean) < 1e-12 * std::max(1.0, a));
            CHECK(std::abs(a - nli.statistics(2 * kPi - phi).n_out_mean) < 1e-12 * std::max(1.0, a));
        }
    }
}

TEST_CASE("output distribution is normalized and sector-conserving") {
    for (const auto& pump : both_pumps(12)) {
        const auto r = run_nli(pump, tau_of(0.7), 1.3);
        const double total = std::accumulate(r.distribution.begin(), r.distribution.end(), 0.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& e : r.ensemble_out.entries) {
            CHECK(std::abs(e.state.norm() - 1.0) < 1e-12);
            const auto occ = mode_occupation(e.state);
            CHECK(std::abs(occ.pump + occ.signal - e.sector.n_total) < 1e-10);
        }
    }
}

TEST_CASE("shared amplifier A equals independent runs") {
    std::vector<double> grid;
    for (int i = 0; i < 25; ++i) grid.push_back(2 * kPi * i / 24.0);
    for (const auto& pump : both_pumps(7)) {
        const auto pattern = interference_pattern(pump, tau_of(0.9), grid);
        REQUIRE(pattern.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto single = run_nli(pump, tau_of(0.9), grid[i]);
            CHECK(std::abs(pattern[i].n_out_mean - single.n_out_mean) < 1e-12);
            CHECK(std::abs(pattern[i].n_out_var - single.n_out_var) < 1e-12);
        }
    }
    CHECK_THROWS_AS((void)interference_pattern(PumpSpec::fock(3), tau_of(0.5), std::vector<double>{}), UsageError);
}

TEST_CASE("full interferometer matches the RK4 oracle") {
    for (const auto& pump : both_pumps(5))
        for (double phi : {0.0, 1.0, 2.5, kPi + 1e-6, 5.0}) {
            CAPTURE(phi);
            const auto ref = oracle_output_distribution(pump, 0.9, phi);
            const auto got = run_nli(pump, tau_of(0.9), phi);
            REQUIRE(got.distribution.size() == ref.size());
            for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(got.distribution[k] - ref[k]) < 1e-8);
            CHECK(std::abs(got.n_out_mean - mean_of(ref)) < 1e-8);
        }
}

TEST_CASE("near-dark statistics: exact offset agrees with the rounded phase") {
    const Interferometer nli(PumpSpec::fock(5), tau_of(0.4));
    const double off = 1e-6;
    const auto a = nli.statistics_near_dark(off);
    const auto b = nli.statistics(kPi + off);
    CHECK(a.n_out_mean == doctest::Approx(b.n_out_mean).epsilon(1e-8));
    // Leading order is quadratic in the offset.
    CHECK(nli.statistics_near_dark(2 * off).n_out_mean / a.n_out_mean == doctest::Approx(4.0).epsilon(1e-5));
}
