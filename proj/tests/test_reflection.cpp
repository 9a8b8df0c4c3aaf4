#include <doctest.h>

#include <cmath>
#include <random>

#include "cavsim/reflection.hpp"

using namespace cavsim;

namespace {

// independent long-double evaluation with the modulus expanded by hand;
// checks the complex-arithmetic implementation
long double detuned_oracle(long double v, long double c, long double d) {
    long double p = 2.0L * c + 1.0L;
    long double re_den = 1.0L + d * d / p;
    long double im_den = 2.0L * d * c / p;
    long double den2 = re_den * re_den + im_den * im_den;
    long double num = (v / p) * (1.0L + d * d);
    long double re = -1.0L + num * re_den / den2;
    long double im = -num * im_den / den2;
    return re * re + im * im;
}

}  // namespace

TEST_CASE("visibility from the measured count rates") {
    CHECK(visibility(272e3, 419e3) == doctest::Approx(0.1943).epsilon(1e-3));
    CHECK(visibility(5.0, 5.0) == 0.0);
    CHECK(visibility(1e-12, 1.0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(visibility(2.0, 1.0), DomainError);
}

TEST_CASE("resonant reflected fraction") {
    double v = visibility(272e3, 419e3);
    // no atoms: the empty-cavity dip
    CHECK(reflected_fraction_resonant(v, 0.0) == doctest::Approx(272.0 / 419.0).epsilon(1e-6));
    // the observed peak signal
    CHECK(reflected_fraction_resonant(v, 0.231) == doctest::Approx(315.0 / 419.0).epsilon(1e-3));
    // saturated Purcell factor returns all the light
    CHECK(reflected_fraction_resonant(v, 1e9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("resonant fraction strictly increasing in C_tot") {
    double v = 0.4;
    double prev = reflected_fraction_resonant(v, 0.0);
    for (double c = 0.05; c < 10.0; c += 0.05) {
        double cur = reflected_fraction_resonant(v, c);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("detuned lineshape reduces to the resonant one at delta = 0") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uv(0.05, 1.0), uc(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        double v = uv(rng), c = uc(rng);
        double lhs = reflected_fraction_detuned(v, c, 0.0);
        double rhs = reflected_fraction_resonant(v, c);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, 1e-30));
    }
}

TEST_CASE("detuned lineshape wings approach the empty-cavity dip") {
    double v = visibility(272e3, 419e3);
    double wings = reflected_fraction_detuned(v, 0.231, 200.0);
    CHECK(wings == doctest::Approx(0.649).epsilon(2e-3));
}

TEST_CASE("detuned lineshape is even in delta and matches the expanded oracle") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uv(0.05, 1.0), uc(0.0, 3.0), ud(-20.0, 20.0);
    for (int i = 0; i < 10; ++i) {
        double v = uv(rng), c = uc(rng), d = ud(rng);
        double f = reflected_fraction_detuned(v, c, d);
        CHECK(f == doctest::Approx(reflected_fraction_detuned(v, c, -d)).epsilon(1e-13));
        CHECK(f == doctest::Approx(double(detuned_oracle(v, c, d))).epsilon(1e-12));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-12);
    }
}

TEST_CASE("count-rate inversion reproduces the measured rates") {
    CountRateTriple counts{419e3, 272e3, 315e3};
    auto res = invert_to_cooperativity(counts, 0.8, 3.0 / 7.0);
    CHECK(res.visibility == doctest::Approx(0.1943).epsilon(1e-3));
    CHECK(res.c_tot == doctest::Approx(0.231).epsilon(2e-3));
    CHECK(res.n_eff == doctest::Approx(0.67).epsilon(0.02));

    // I_atoms at the empty-cavity level means no atoms
    CountRateTriple quiet{419e3, 272e3, 272e3};
    CHECK(invert_to_cooperativity(quiet, 0.8, 3.0 / 7.0).c_tot == doctest::Approx(0.0));

    CountRateTriple below{419e3, 272e3, 250e3};
    CHECK_THROWS_AS(invert_to_cooperativity(below, 0.8, 3.0 / 7.0), DomainError);
}

TEST_CASE("inversion round-trips the forward model (property)") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uv(0.05, 0.95), uc(0.0, 2.0);
    for (int i = 0; i < 300; ++i) {
        double v = uv(rng), c_tot = uc(rng);
        double i_max = 419e3;
        double i_min = i_max * (1.0 - v) * (1.0 - v);
        double i_atoms = i_max * reflected_fraction_resonant(v, c_tot);
        auto res = invert_to_cooperativity({i_max, i_min, i_atoms}, 0.8, 3.0 / 7.0);
        CHECK(res.c_tot == doctest::Approx(c_tot).epsilon(1e-9));
    }
}

TEST_CASE("validity guard") {
    CHECK(detuning_in_validity_range(5.0, 100.0, 3.0));
    CHECK_FALSE(detuning_in_validity_range(15.0, 100.0, 3.0));
}

TEST_CASE("gauss-hermite integrates gaussians exactly enough") {
    std::vector<double> x, w;
    gauss_hermite(16, x, w);
    double sum = 0.0, var = 0.0;
    for (int i = 0; i < 16; ++i) {
        sum += w[i];
        var += w[i] * x[i] * x[i];
    }
    CHECK(sum == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(var / sum == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("averaged lineshape: flat curve with no atoms") {
    double v = visibility(272e3, 419e3);
    FluctuationModel m{0.0, 0.8, 3.0 / 7.0};
    std::vector<double> grid{-10.0, -5.0, 0.0, 5.0, 10.0};
    auto curve = averaged_lineshape(v, m, 0.0, grid);
    for (double f : curve) CHECK(f == doctest::Approx((1.0 - v) * (1.0 - v)).epsilon(1e-9));
}

TEST_CASE("averaged lineshape: quadrature and Monte Carlo agree") {
    double v = visibility(272e3, 419e3);
    FluctuationModel m{0.7, 0.83, 3.0 / 7.0};
    std::vector<double> grid{-8.0, -3.0, 0.0, 3.0, 8.0};
    LineshapeConfig quad;
    auto cq = averaged_lineshape(v, m, 0.5, grid, quad);
    LineshapeConfig mc;
    mc.method = AveragingMethod::monte_carlo;
    mc.mc_replicas = 20000;
    mc.seed = 99;
    auto cm = averaged_lineshape(v, m, 0.5, grid, mc);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(cq[i] == doctest::Approx(cm[i]).epsilon(0.01));
}

TEST_CASE("averaged lineshape contrast shrinks with laser linewidth") {
    double v = visibility(272e3, 419e3);
    FluctuationModel m{0.7, 0.83, 3.0 / 7.0};
    std::vector<double> grid{0.0, 30.0};
    double prev_contrast = 1e9;
    for (double fwhm : {0.0, 1.0, 3.0, 8.0}) {
        auto c = averaged_lineshape(v, m, fwhm, grid);
        double contrast = c[0] - c[1];
        CHECK(contrast < prev_contrast + 1e-12);
        prev_contrast = contrast;
    }
}

TEST_CASE("averaged lineshape outputs stay in [0,1]") {
    double v = 0.3;
    FluctuationModel m{1.5, 0.8, 3.0 / 7.0};
    std::vector<double> grid;
    for (double d = -20.0; d <= 20.0; d += 1.0) grid.push_back(d);
    auto c = averaged_lineshape(v, m, 2.0, grid);
    for (double f : c) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-9);
    }
}
