#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cavsim/scenarios.hpp"

using namespace cavsim;

namespace {

ScenarioConfig fast_config() {
    auto cfg = default_config();
    cfg.run.drops_tof = 8;
    cfg.run.drops_noise = 16;
    cfg.tof.sample_budget = 2000;
    cfg.noise.sample_budget = 1000;
    cfg.pulse.sample_budget = 1000;
    return cfg;
}

}  // namespace

TEST_CASE("parameter report carries the headline numbers") {
    auto report = run_params(default_config());
    CHECK(report.find("2g       = 2pi x 200 MHz") != std::string::npos);
    CHECK(report.find("kappa    = 2pi x 2.01") != std::string::npos);
    CHECK(report.find("C        = 0.828") != std::string::npos);
    CHECK(report.find("2pi x 15.94 MHz") != std::string::npos);
    CHECK(report.find("2pi x 9.938 MHz") != std::string::npos);
    CHECK(report.find("0.1943") != std::string::npos);
}

TEST_CASE("tof with a vanishing cloud sits at the empty-cavity dip") {
    auto cfg = fast_config();
    cfg.cloud.atom_count = 1e-9;
    auto out = run_tof(cfg);
    double v = cfg.probe_visibility();
    double base = (1.0 - v) * (1.0 - v);
    double mean_counts = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        CHECK(out.n_eff[i] < 1e-9);
        CHECK(out.fraction[i] == doctest::Approx(base).epsilon(1e-6));
        mean_counts += out.counts[i] / out.times.size();
    }
    // detected rate at the dip: eta * i_min per bin
    double expect = cfg.chain.net_efficiency() * cfg.probe.i_min * cfg.tof.bin_width;
    CHECK(mean_counts == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("tof output is independent of the thread count") {
    auto cfg = fast_config();
    cfg.run.threads = 1;
    auto a = run_tof(cfg);
    cfg.run.threads = 5;
    auto b = run_tof(cfg);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.n_eff[i] == b.n_eff[i]);
        CHECK(a.counts[i] == b.counts[i]);
    }
    // and the hash ignores the hint, so CSV bytes match too
    cfg.run.threads = 1;
    auto csv1 = tof_csv(cfg, a).to_string();
    cfg.run.threads = 5;
    auto csv2 = tof_csv(cfg, b).to_string();
    CHECK(csv1 == csv2);
}

TEST_CASE("quadrature scan has the dip structure") {
    auto cfg = default_config();
    auto out = run_scan(cfg);
    double v = cfg.probe_visibility();
    auto it0 = std::min_element(out.delta.begin(), out.delta.end(),
                                [](double a, double b) { return std::abs(a) < std::abs(b); });
    std::size_t i0 = it0 - out.delta.begin();
    CHECK(out.fraction[i0] > out.fraction.front());  // atoms lift the dip center
    CHECK(out.fraction.front() == doctest::Approx((1.0 - v) * (1.0 - v)).epsilon(0.02));
    CHECK(out.fraction.front() == doctest::Approx(out.fraction.back()).epsilon(0.01));
}

TEST_CASE("noisy scan scatters around the quadrature curve") {
    auto cfg = default_config();
    cfg.scan.noisy = true;
    cfg.run.drops_tof = 300;
    auto noisy = run_scan(cfg);
    cfg.scan.noisy = false;
    auto clean = run_scan(cfg);
    for (std::size_t i = 0; i < noisy.delta.size(); ++i) {
        CHECK(noisy.sigma[i] > 0.0);
        CHECK(std::abs(noisy.fraction[i] - clean.fraction[i]) < 5.0 * noisy.sigma[i]);
    }
}

TEST_CASE("scan-and-fit pipeline recovers the configured atom number") {
    auto cfg = default_config();
    cfg.scan.noisy = true;
    cfg.scan.mean_n_eff = 0.7;
    cfg.run.drops_tof = 100;
    auto out = run_scan(cfg);
    auto data = scan_to_dataset(cfg, out);
    auto res = fit_scan(data, fit_config_from(cfg));
    CHECK(res.converged);
    CHECK(std::abs(res.n_eff - 0.7) < 3.0 * res.n_eff_se + 0.05 * 0.7);
}

TEST_CASE("noise run without atoms is Poissonian at the dip rate") {
    auto cfg = fast_config();
    cfg.cloud.atom_count = 1e-9;
    cfg.run.drops_noise = 48;
    cfg.noise.t_start = 33e-3;
    cfg.noise.t_end = 41e-3;
    cfg.noise.bin_width = 50e-6;
    auto out = run_noise(cfg);

    double f_sum = 0.0, r_sum = 0.0, n = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (std::isnan(out.f_corr[i])) continue;
        f_sum += out.f_corr[i];
        r_sum += out.mean_rate[i];
        n += 1.0;
    }
    CHECK(n > 100.0);
    CHECK(f_sum / n == doctest::Approx(1.0).epsilon(0.06));
    // dead-time corrected rate recovers the thinned dip rate
    double expect = cfg.chain.net_efficiency() * cfg.probe.i_min;
    CHECK(r_sum / n == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("noise run: length jitter off lock center adds the predicted excess") {
    auto cfg = fast_config();
    cfg.cloud.atom_count = 1e-9;  // isolate the jitter contribution
    cfg.run.drops_noise = 48;
    cfg.noise.t_start = 33e-3;
    cfg.noise.t_end = 41e-3;
    cfg.noise.bin_width = 250e-6;
    cfg.noise.lock_offset = 3e-10;
    cfg.noise.length_jitter_rms = 2.5e-10;
    auto out = run_noise(cfg);

    double f_sum = 0.0, n = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (std::isnan(out.f_raw[i])) continue;
        f_sum += out.f_raw[i];
        n += 1.0;
    }
    double f_mean = f_sum / n;
    // thinning scales the excess by the net efficiency
    auto pred = cavity_jitter_noise(cfg.probe_visibility(), 0.0, cfg.noise.length_jitter_rms,
                                    cfg.cavity, cfg.probe.i_max, cfg.noise.bin_width,
                                    cfg.noise.lock_offset);
    double expect = cfg.chain.net_efficiency() * pred.excess_fano;
    CHECK(f_mean - 1.0 > 0.2);
    CHECK(f_mean - 1.0 == doctest::Approx(expect).epsilon(0.3));
}

TEST_CASE("pulse run: emission starts at turn-on and needs atoms and a resonant cavity") {
    auto cfg = fast_config();
    cfg.run.drops_tof = 6;
    cfg.pulse.sample_budget = 2000;
    // a generous pump budget keeps atoms bright through the whole transit
    cfg.pulse.pump_photon_budget = 1e9;
    cfg.pulse.scatter_rate = 1e6;
    auto out = run_pulse(cfg);
    double total = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (out.times[i] <= cfg.pulse.turn_on) CHECK(out.emission_weight[i] == 0.0);
        total += out.emission_weight[i];
        CHECK(out.detected_rate[i] ==
              doctest::Approx(cfg.chain.net_efficiency() * out.emission_weight[i] /
                              cfg.pulse.bin_width));
    }
    CHECK(total > 0.0);

    auto detuned = cfg;
    detuned.pulse.cavity_detuned = true;
    auto out_det = run_pulse(detuned);
    for (double e : out_det.emission_weight) CHECK(e == 0.0);

    auto empty = cfg;
    empty.pulse.empty_cloud = true;
    auto out_empty = run_pulse(empty);
    for (double e : out_empty.emission_weight) CHECK(e == 0.0);
}

TEST_CASE("csv builders stamp schema and match the output length") {
    auto cfg = fast_config();
    auto tof = run_tof(cfg);
    auto table = tof_csv(cfg, tof);
    CHECK(table.rows() == tof.times.size());
    auto text = table.to_string();
    CHECK(text.rfind("# schema=tof v1", 0) == 0);

    auto scan = run_scan(cfg);
    CHECK(scan_csv(cfg, scan).rows() == scan.delta.size());
}
