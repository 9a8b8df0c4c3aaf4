#include <doctest.h>

#include <cmath>

#include "cavsim/fitting.hpp"

using namespace cavsim;

namespace {

std::vector<double> scan_grid() {
    std::vector<double> g;
    for (double d = -10.0; d <= 10.0; d += 1.0) g.push_back(d);
    return g;
}

// noiseless dataset produced by the forward model itself
ScanDataset make_dataset(double n_true, double fwhm, double sigma) {
    ScanDataset data;
    data.delta = scan_grid();
    data.v = 0.1943;
    data.single_atom_c = 0.83;
    data.zeeman_factor = 3.0 / 7.0;
    FluctuationModel model{n_true, data.single_atom_c, data.zeeman_factor};
    data.fraction = averaged_lineshape(data.v, model, fwhm, data.delta);
    data.sigma.assign(data.delta.size(), sigma);
    return data;
}

}  // namespace

TEST_CASE("noiseless round trip recovers the atom number") {
    auto data = make_dataset(1.1, 0.5, 1e-3);
    FitConfig cfg;
    cfg.laser_fwhm = 0.5;
    auto res = fit_scan(data, cfg);
    CHECK(res.converged);
    CHECK(res.n_eff == doctest::Approx(1.1).epsilon(1e-4));
    CHECK(res.chi2 < 1e-6);
    CHECK(res.dof == int(data.delta.size()) - 1);
}

TEST_CASE("flat data fits to zero atoms") {
    ScanDataset data;
    data.delta = scan_grid();
    data.v = 0.1943;
    data.single_atom_c = 0.83;
    data.zeeman_factor = 3.0 / 7.0;
    double base = (1.0 - data.v) * (1.0 - data.v);
    data.fraction.assign(data.delta.size(), base);
    data.sigma.assign(data.delta.size(), 1e-3);
    FitConfig cfg;
    auto res = fit_scan(data, cfg);
    CHECK(res.n_eff == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("floating the visibility still recovers both parameters") {
    auto data = make_dataset(0.8, 0.0, 1e-3);
    FitConfig cfg;
    cfg.float_visibility = true;
    auto res = fit_scan(data, cfg);
    CHECK(res.n_eff == doctest::Approx(0.8).epsilon(1e-3));
    CHECK(res.visibility == doctest::Approx(data.v).epsilon(1e-3));
}

TEST_CASE("standard error scales linearly with the data uncertainties") {
    auto d1 = make_dataset(1.1, 0.5, 1e-3);
    auto d2 = make_dataset(1.1, 0.5, 3e-3);
    FitConfig cfg;
    cfg.laser_fwhm = 0.5;
    auto r1 = fit_scan(d1, cfg);
    auto r2 = fit_scan(d2, cfg);
    CHECK(r2.n_eff_se == doctest::Approx(3.0 * r1.n_eff_se).epsilon(1e-3));
    CHECK(r1.n_eff_se > 0.0);
}

TEST_CASE("profile interval matches the curvature error on clean data") {
    auto data = make_dataset(1.1, 0.5, 2e-3);
    FitConfig cfg;
    cfg.laser_fwhm = 0.5;
    auto res = fit_scan(data, cfg);
    auto prof = profile_uncertainty(res, data, cfg);
    CHECK_FALSE(prof.open_upper);
    CHECK_FALSE(prof.clipped_at_zero);
    CHECK(prof.upper - res.n_eff == doctest::Approx(res.n_eff_se).epsilon(0.15));
    CHECK(res.n_eff - prof.lower == doctest::Approx(res.n_eff_se).epsilon(0.15));
}

TEST_CASE("profile clips at zero when zero atoms are consistent") {
    auto data = make_dataset(0.05, 0.0, 0.5);  // sigma huge: no sensitivity
    FitConfig cfg;
    auto res = fit_scan(data, cfg);
    auto prof = profile_uncertainty(res, data, cfg);
    CHECK(prof.clipped_at_zero);
    CHECK(prof.lower == 0.0);
    CHECK(prof.upper > res.n_eff);
}

TEST_CASE("dataset validation") {
    auto good = make_dataset(1.0, 0.0, 1e-3);
    CHECK_NOTHROW(good.validate());

    auto few = good;
    few.delta.resize(3);
    few.fraction.resize(3);
    few.sigma.resize(3);
    CHECK_THROWS_AS(few.validate(), DomainError);

    auto onesided = good;
    for (auto& d : onesided.delta) d = std::abs(d) + 0.1;
    CHECK_THROWS_AS(onesided.validate(), DomainError);

    auto badsig = good;
    badsig.sigma[4] = 0.0;
    CHECK_THROWS_AS(badsig.validate(), DomainError);

    auto ragged = good;
    ragged.sigma.pop_back();
    CHECK_THROWS_AS(ragged.validate(), DomainError);
}

TEST_CASE("iteration budget exhaustion raises a convergence error") {
    auto data = make_dataset(1.1, 0.5, 1e-3);
    FitConfig cfg;
    cfg.laser_fwhm = 0.5;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(fit_scan(data, cfg), ConvergenceError);
}

TEST_CASE("profile refuses an unconverged result") {
    auto data = make_dataset(1.0, 0.0, 1e-3);
    FitResult stale;  // converged == false
    CHECK_THROWS_AS(profile_uncertainty(stale, data, FitConfig{}), DomainError);
}
