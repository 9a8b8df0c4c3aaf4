#include <doctest.h>

#include <cmath>
#include <random>

#include "cavsim/mode_field.hpp"

using namespace cavsim;

namespace {

ModeGeometry bench_mode() {
    ModeGeometry g;
    g.waist = 4.6e-6;
    g.wavelength = 780e-9;
    g.length = 133e-6;
    return g;
}

}  // namespace

TEST_CASE("mode intensity at landmarks") {
    auto g = bench_mode();
    CHECK(mode_intensity(g, {0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    // node a quarter wavelength along the axis
    CHECK(mode_intensity(g, {g.wavelength / 4.0, 0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
    // one waist off axis
    CHECK(mode_intensity(g, {0.0, g.waist, 0.0}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
    // beyond the mirrors
    CHECK(mode_intensity(g, {0.6 * g.length, 0.0, 0.0}) == 0.0);
}

TEST_CASE("mode intensity bounds, axial periodicity, transverse symmetry (property)") {
    auto g = bench_mode();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ax(-g.length / 2, g.length / 2);
    std::uniform_real_distribution<double> tr(-3 * g.waist, 3 * g.waist);
    for (int i = 0; i < 500; ++i) {
        Vec3 r{ax(rng), tr(rng), tr(rng)};
        double v = mode_intensity(g, r);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        // reflection through the axis
        CHECK(mode_intensity(g, {r[0], -r[1], -r[2]}) == doctest::Approx(v).epsilon(1e-12));
        // half-wavelength axial period (while staying inside the mode)
        double shifted = r[0] + g.wavelength / 2.0;
        if (std::abs(shifted) < g.length / 2.0)
            CHECK(mode_intensity(g, {shifted, r[1], r[2]}) == doctest::Approx(v).epsilon(1e-6));
    }
}

TEST_CASE("aggregate coupling: bench numbers") {
    auto single = aggregate_coupling(0.8, {1.0}, 3.0 / 7.0);
    CHECK(single.c_tot == doctest::Approx(0.3429).epsilon(1e-3));
    CHECK(single.n_eff == doctest::Approx(1.0));

    auto empty = aggregate_coupling(0.8, {}, 3.0 / 7.0);
    CHECK(empty.c_tot == 0.0);
    CHECK(empty.n_eff == 0.0);

    // sum of intensities 0.674 reproduces the measured C_tot ~ 0.23
    auto peak = aggregate_coupling(0.8, {0.674}, 3.0 / 7.0);
    CHECK(peak.c_tot == doctest::Approx(0.231).epsilon(2e-3));
}

TEST_CASE("aggregate coupling additivity, and N_eff independent of C (property)") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a, b, both;
        int na = 1 + int(uni(rng) * 6), nb = 1 + int(uni(rng) * 6);
        for (int i = 0; i < na; ++i) a.push_back(uni(rng));
        for (int i = 0; i < nb; ++i) b.push_back(uni(rng));
        both = a;
        both.insert(both.end(), b.begin(), b.end());
        double c = uni(rng) * 2.0;
        auto ra = aggregate_coupling(c, a, 3.0 / 7.0);
        auto rb = aggregate_coupling(c, b, 3.0 / 7.0);
        auto rboth = aggregate_coupling(c, both, 3.0 / 7.0);
        CHECK(rboth.c_tot == doctest::Approx(ra.c_tot + rb.c_tot).epsilon(1e-12));
        CHECK(rboth.n_eff <= both.size());
        // pure geometry: scaling C leaves N_eff alone
        auto scaled = aggregate_coupling(3.0 * c, both, 3.0 / 7.0);
        CHECK(scaled.n_eff == doctest::Approx(rboth.n_eff).epsilon(1e-12));
    }
}

TEST_CASE("aggregate coupling rejects out-of-range intensity") {
    CHECK_THROWS_AS(aggregate_coupling(0.8, {1.2}, 3.0 / 7.0), DomainError);
    CHECK_THROWS_AS(aggregate_coupling(0.8, {-0.1}, 3.0 / 7.0), DomainError);
}

TEST_CASE("geometry validation") {
    auto g = bench_mode();
    g.axis = {1.0, 1.0, 0.0};
    CHECK_THROWS_AS(g.validate(), DomainError);
}
