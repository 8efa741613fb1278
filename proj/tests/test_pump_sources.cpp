#include <doctest.h>

#include <cmath>

#include "nli/pump_sources.hpp"

using namespace nli;

namespace {

// Independent Poisson weight by repeated multiplication.
double poisson_product(double n_mean, int n) {
    double w = std::exp(-n_mean);
    for (int k = 1; k <= n; ++k) w *= n_mean / k;
    return w;
}

} // namespace

TEST_CASE("parse and print pump kinds") {
    CHECK(parse_pump_kind("fock") == PumpKind::Fock);
    CHECK(parse_pump_kind("coherent") == PumpKind::Coherent);
    CHECK(to_string(PumpKind::Coherent) == "coherent");
    CHECK_THROWS_AS((void)parse_pump_kind("thermal"), UsageError);
}

TEST_CASE("Fock pump expands to one sector") {
    const auto ens = expand(PumpSpec::fock(5));
    REQUIRE(ens.entries.size() == 1);
    CHECK(ens.entries[0].sector.n_total == 5);
    CHECK(ens.entries[0].weight == 1.0);
    CHECK(ens.entries[0].state.coeffs(0) == std::complex<double>(1.0, 0.0));
    CHECK(ens.entries[0].state.coeffs.tail(5).norm() == 0.0);
    CHECK(ens.max_sector() == 5);
}

TEST_CASE("invalid pumps are rejected") {
    CHECK_THROWS_AS((void)expand(PumpSpec{PumpKind::Fock, 2.5, 0.0}), UsageError);
    CHECK_THROWS_AS((void)expand(PumpSpec::coherent(-1.0)), UsageError);
    CHECK_THROWS_AS((void)expand(PumpSpec::coherent(4.0), TruncationRule{0.0, {}}), UsageError);
    CHECK_THROWS_AS((void)expand(PumpSpec::coherent(4.0), TruncationRule{1.0, {}}), UsageError);
}

TEST_CASE("coherent pump with N = 0 is the vacuum sector") {
    const auto ens = expand(PumpSpec::coherent(0.0));
    REQUIRE(ens.entries.size() == 1);
    CHECK(ens.entries[0].sector.n_total == 0);
    CHECK(ens.entries[0].weight == 1.0);
}

TEST_CASE("poisson_weight matches a direct product") {
    for (double n_mean : {0.3, 5.0, 37.5, 100.0})
        for (int n : {0, 1, 7, 50, 120})
            CHECK(poisson_weight(n_mean, n) == doctest::Approx(poisson_product(n_mean, n)).epsilon(1e-11));
    CHECK(poisson_weight(3.0, -1) == 0.0);
}

TEST_CASE("coherent N = 5 keeps exactly the sectors above the cut") {
    const double cut = 1e-5 * poisson_product(5.0, 5);
    int lo = -1, hi = -1;
    for (int n = 0; n < 60; ++n) {
        if (poisson_product(5.0, n) >= cut) {
            if (lo < 0) lo = n;
            hi = n;
        }
    }
    const auto ens = expand(PumpSpec::coherent(5.0));
    REQUIRE(!ens.entries.empty());
    CHECK(ens.entries.front().sector.n_total == lo);
    CHECK(ens.entries.back().sector.n_total == hi);
    CHECK(static_cast<int>(ens.entries.size()) == hi - lo + 1);
    for (std::size_t i = 0; i < ens.entries.size(); ++i)
        CHECK(ens.entries[i].sector.n_total == lo + static_cast<int>(i));
}

TEST_CASE("retained weight and state norms") {
    for (double n_mean = 0.1; n_mean <= 100.0; n_mean *= 1.37) {
        CAPTURE(n_mean);
        const auto ens = expand(PumpSpec::coherent(n_mean, 0.4));
        CHECK(ens.weights_sum >= 1.0 - 1e-4);
        CHECK(ens.weights_sum <= 1.0 + 1e-12);
        for (const auto& e : ens.entries) CHECK(std::abs(e.state.norm() - 1.0) < 1e-15);
    }
}

TEST_CASE("tighter thresholds never drop sectors") {
    for (double n_mean : {0.7, 12.0, 63.0}) {
        std::size_t prev = 0;
        for (double threshold : {1e-2, 1e-4, 1e-6, 1e-8}) {
            const auto ens = expand(PumpSpec::coherent(n_mean), TruncationRule{threshold, {}});
            CHECK(ens.entries.size() >= prev);
            prev = ens.entries.size();
        }
    }
}

TEST_CASE("pump phase enters each sector as n * arg(alpha)") {
    const auto ens = expand(PumpSpec::coherent(3.0, 0.25));
    for (const auto& e : ens.entries) {
        const auto c0 = e.state.coeffs(0);
        CHECK(std::abs(c0 - std::polar(1.0, 0.25 * e.sector.n_total)) < 1e-14);
    }
}
