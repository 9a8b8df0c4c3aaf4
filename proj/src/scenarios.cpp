#include "cavsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "cavsim/cloud_mc.hpp"
#include "cavsim/detector_chain.hpp"
#include "cavsim/reflection.hpp"
#include "cavsim/rng.hpp"

namespace cavsim {

namespace {

// static chunking over drops; slot-per-drop results keep the reduction
// order independent of the thread count
template <typename F>
void parallel_drops(int drops, int threads, F&& per_drop) {
    threads = std::min(threads, drops);
    if (threads <= 1) {
        for (int d = 0; d < drops; ++d) per_drop(d);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int d = t; d < drops; d += threads) per_drop(d);
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<double> bin_centers(double t_start, double t_end, double bin) {
    std::vector<double> t;
    std::size_t n = static_cast<std::size_t>(std::round((t_end - t_start) / bin));
    for (std::size_t i = 0; i < n; ++i) t.push_back(t_start + (i + 0.5) * bin);
    return t;
}

std::string hz_scaled(double rad_per_s) {
    double hz = rad_per_s / constants::two_pi;
    char buf[64];
    if (hz >= 1e9)
        std::snprintf(buf, sizeof(buf), "2pi x %.4g GHz", hz / 1e9);
    else if (hz >= 1e6)
        std::snprintf(buf, sizeof(buf), "2pi x %.4g MHz", hz / 1e6);
    else
        std::snprintf(buf, sizeof(buf), "2pi x %.4g kHz", hz / 1e3);
    return buf;
}

}  // namespace

std::string run_params(const ScenarioConfig& cfg) {
    cfg.validate();
    auto rates = cfg.rates();
    auto decay = enhanced_decay_rate(rates.gamma(), rates.cooperativity());
    auto v_trav = mode_volume(cfg.cavity, ModeVolumeConvention::traveling_gaussian);
    auto v_stand = mode_volume(cfg.cavity, ModeVolumeConvention::standing_gaussian);

    std::ostringstream out;
    char buf[128];
    out << "g        = " << hz_scaled(rates.g()) << "\n";
    out << "2g       = " << hz_scaled(2.0 * rates.g()) << " (vacuum Rabi frequency)\n";
    out << "kappa    = " << hz_scaled(rates.kappa()) << "\n";
    out << "gamma    = " << hz_scaled(rates.gamma()) << "\n";
    std::snprintf(buf, sizeof(buf), "C        = %.4g\n", rates.cooperativity());
    out << buf;
    out << "2y(1+2C) = " << hz_scaled(decay.total) << " (enhanced decay, single atom at antinode)\n";
    out << "4Cy      = " << hz_scaled(decay.into_mode) << " (emission into the mode)\n";
    std::snprintf(buf, sizeof(buf), "V        = %.4g m^3 (traveling-wave Gaussian)\n",
                  v_trav.volume);
    out << buf;
    std::snprintf(buf, sizeof(buf), "V        = %.4g m^3 (standing-wave Gaussian)\n",
                  v_stand.volume);
    out << buf;
    std::snprintf(buf, sizeof(buf), "mu       = %.4g C m (from radiative decay)\n",
                  cfg.transition.mu);
    out << buf;
    std::snprintf(buf, sizeof(buf), "v        = %.4g (probe fringe visibility)\n",
                  cfg.probe_visibility());
    out << buf;
    return out.str();
}

TofOutput run_tof(const ScenarioConfig& cfg) {
    cfg.validate();
    auto geom = cfg.mode_geometry();
    auto rates = cfg.rates();
    const double v = cfg.probe_visibility();
    const double zf = cfg.transition.zeeman_factor;
    const int drops = cfg.run.drops_tof;
    const auto times = bin_centers(cfg.tof.t_start, cfg.tof.t_end, cfg.tof.bin_width);

    std::vector<std::vector<double>> n_eff(drops), counts(drops);
    parallel_drops(drops, cfg.run.threads, [&](int d) {
        auto rng = substream(cfg.run.seed, static_cast<std::uint64_t>(d));
        auto samples = sample_cloud(cfg.cloud, geom, rng, cfg.tof.sample_budget);
        auto trace = transit_trace(samples, geom, rates, zf, times);
        n_eff[d] = trace.n_eff;

        // detected probe counts for this drop
        std::vector<double> rate(times.size());
        double rate_max = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            rate[i] = cfg.probe.i_max * reflected_fraction_resonant(v, trace.c_tot[i]);
            rate_max = std::max(rate_max, rate[i]);
        }
        const double t0 = cfg.tof.t_start;
        const double bw = cfg.tof.bin_width;
        auto rate_fn = [&rate, t0, bw](double t) {
            std::size_t i = static_cast<std::size_t>((t - 0.0) / bw);
            return i < rate.size() ? rate[i] : rate.back();
        };
        auto series = generate_counts(rate_fn, rate_max * 1.0000001, cfg.chain, bw,
                                      cfg.tof.t_end - t0, rng);
        counts[d] = series.counts;
    });

    TofOutput out;
    out.times = times;
    out.n_eff.assign(times.size(), 0.0);
    out.counts.assign(times.size(), 0.0);
    for (int d = 0; d < drops; ++d)
        for (std::size_t i = 0; i < times.size(); ++i) {
            out.n_eff[i] += n_eff[d][i] / drops;
            out.counts[i] += counts[d][i] / drops;
        }
    out.c_tot.resize(times.size());
    out.fraction.resize(times.size());
    const double coupling = zf * rates.cooperativity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.c_tot[i] = coupling * out.n_eff[i];
        out.fraction[i] = reflected_fraction_resonant(v, out.c_tot[i]);
    }
    return out;
}

CsvTable tof_csv(const ScenarioConfig& cfg, const TofOutput& out) {
    CsvTable t("tof", config_hash(cfg), cfg.run.seed);
    t.add_column("time_s");
    t.add_column("n_eff");
    t.add_column("c_tot");
    t.add_column("fraction");
    t.add_column("counts");
    for (std::size_t i = 0; i < out.times.size(); ++i)
        t.add_row({out.times[i], out.n_eff[i], out.c_tot[i], out.fraction[i], out.counts[i]});
    return t;
}

ScanOutput synthetic_scan(double v, const FluctuationModel& model, double laser_fwhm,
                          const std::vector<double>& delta_grid, double i_max,
                          double integration_time, int drops, std::uint64_t seed) {
    // analytic per-atom mean intensity of the fluctuation model
    const double a = model.box_halfwidth_waists;
    const double trans = std::sqrt(constants::pi / 2.0) * std::erf(std::sqrt(2.0) * a) / (2.0 * a);
    const double mean_i = 0.5 * trans * trans;
    const double lambda = model.mean_n_eff / mean_i;
    const double scale = model.zeeman_factor * model.single_atom_c;
    const double sigma_laser = laser_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));

    ScanOutput out;
    out.delta = delta_grid;
    out.fraction.resize(delta_grid.size());
    out.sigma.resize(delta_grid.size());

    for (std::size_t j = 0; j < delta_grid.size(); ++j) {
        auto rng = substream(seed, 0x7363616e0000ULL + j);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::poisson_distribution<int> pois_atoms(lambda);
        double sum = 0.0, sum2 = 0.0;
        for (int d = 0; d < drops; ++d) {
            int m = pois_atoms(rng);
            double s = 0.0;
            for (int k = 0; k < m; ++k) {
                double phi = constants::pi * uni(rng);
                double xi = a * (2.0 * uni(rng) - 1.0);
                double eta = a * (2.0 * uni(rng) - 1.0);
                double cp = std::cos(phi);
                s += cp * cp * std::exp(-2.0 * (xi * xi + eta * eta));
            }
            double delta = delta_grid[j];
            if (sigma_laser > 0.0) delta += sigma_laser * gauss(rng);
            double frac = reflected_fraction_detuned(v, scale * s, delta);
            double mean_counts = i_max * frac * integration_time;
            std::poisson_distribution<long> pois_counts(mean_counts);
            double est = pois_counts(rng) / (i_max * integration_time);
            sum += est;
            sum2 += est * est;
        }
        double mean = sum / drops;
        double var = (sum2 - drops * mean * mean) / (drops - 1.0);
        out.fraction[j] = mean;
        // guard against degenerate sample variance in quiet wings
        double shot_floor = std::sqrt(mean / (i_max * integration_time * drops));
        out.sigma[j] = std::max(std::sqrt(std::max(var, 0.0) / drops), 0.5 * shot_floor);
    }
    return out;
}

ScanOutput run_scan(const ScenarioConfig& cfg) {
    cfg.validate();
    auto rates = cfg.rates();
    std::vector<double> grid(cfg.scan.points);
    for (int i = 0; i < cfg.scan.points; ++i)
        grid[i] = cfg.scan.delta_min +
                  (cfg.scan.delta_max - cfg.scan.delta_min) * i / (cfg.scan.points - 1.0);

    FluctuationModel model{cfg.scan.mean_n_eff, rates.cooperativity(),
                           cfg.transition.zeeman_factor, cfg.scan.box_halfwidth_waists};
    if (cfg.scan.noisy)
        return synthetic_scan(cfg.probe_visibility(), model, cfg.scan.laser_fwhm, grid,
                              cfg.probe.i_max, cfg.scan.integration_time, cfg.run.drops_tof,
                              cfg.run.seed);

    ScanOutput out;
    out.delta = grid;
    out.fraction =
        averaged_lineshape(cfg.probe_visibility(), model, cfg.scan.laser_fwhm, grid);
    out.sigma.assign(grid.size(), 1e-4);
    return out;
}

CsvTable scan_csv(const ScenarioConfig& cfg, const ScanOutput& out) {
    CsvTable t("scan", config_hash(cfg), cfg.run.seed);
    t.add_column("delta_la");
    t.add_column("fraction");
    t.add_column("sigma");
    for (std::size_t i = 0; i < out.delta.size(); ++i)
        t.add_row({out.delta[i], out.fraction[i], out.sigma[i]});
    return t;
}

ScanDataset scan_to_dataset(const ScenarioConfig& cfg, const ScanOutput& out) {
    ScanDataset d;
    d.delta = out.delta;
    d.fraction = out.fraction;
    d.sigma = out.sigma;
    d.v = cfg.probe_visibility();
    d.single_atom_c = cfg.rates().cooperativity();
    d.zeeman_factor = cfg.transition.zeeman_factor;
    return d;
}

FitConfig fit_config_from(const ScenarioConfig& cfg) {
    FitConfig fc;
    fc.float_visibility = cfg.fit.float_visibility;
    fc.float_linewidth = cfg.fit.float_linewidth;
    fc.laser_fwhm = cfg.scan.laser_fwhm;
    fc.box_halfwidth_waists = cfg.scan.box_halfwidth_waists;
    return fc;
}

NoiseOutput run_noise(const ScenarioConfig& cfg) {
    cfg.validate();
    auto geom = cfg.mode_geometry();
    auto rates = cfg.rates();
    const double v = cfg.probe_visibility();
    const double zf = cfg.transition.zeeman_factor;
    const double kappa = rates.kappa();
    const int drops = cfg.run.drops_noise;
    const auto times = bin_centers(cfg.noise.t_start, cfg.noise.t_end, cfg.noise.bin_width);
    const double dwdl = -cfg.cavity.omega_c / cfg.cavity.length;

    std::vector<std::vector<double>> raw(drops);
    parallel_drops(drops, cfg.run.threads, [&](int d) {
        auto rng = substream(cfg.run.seed, 0x6e6f0000ULL + static_cast<std::uint64_t>(d));
        auto samples = sample_cloud(cfg.cloud, geom, rng, cfg.noise.sample_budget);
        auto trace = transit_trace(samples, geom, rates, zf, times);

        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> rate(times.size());
        double rate_max = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            double dl = cfg.noise.lock_offset;
            if (cfg.noise.length_jitter_rms > 0.0)
                dl += cfg.noise.length_jitter_rms * gauss(rng);
            double frac =
                dl == 0.0
                    ? reflected_fraction_resonant(v, trace.c_tot[i])
                    : reflected_fraction_cavity_detuned(v, trace.c_tot[i], dl * dwdl, kappa);
            rate[i] = cfg.probe.i_max * frac;
            rate_max = std::max(rate_max, rate[i]);
        }
        const double bw = cfg.noise.bin_width;
        auto rate_fn = [&rate, bw](double t) {
            std::size_t i = static_cast<std::size_t>(t / bw);
            return i < rate.size() ? rate[i] : rate.back();
        };
        auto series = generate_counts(rate_fn, rate_max * 1.0000001, cfg.chain, bw,
                                      cfg.noise.t_end - cfg.noise.t_start, rng);
        raw[d] = series.counts;
    });

    // per-drop dead-time correction, then variance/mean over drops
    std::vector<std::vector<double>> corrected(drops);
    for (int d = 0; d < drops; ++d) {
        CountSeries s;
        s.bin_width = cfg.noise.bin_width;
        s.counts = raw[d];
        corrected[d] = dead_time_correct(s, cfg.chain.dead_time).counts;
    }

    NoiseOutput out;
    out.times = times;
    out.f_raw = fano(raw);
    out.f_dead = fano(corrected);
    out.f_corr.resize(times.size());
    out.mean_rate.assign(times.size(), 0.0);
    const double eta = cfg.chain.net_efficiency();
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.f_corr[i] = std::isnan(out.f_dead[i]) ? out.f_dead[i]
                                                  : loss_correct_fano(out.f_dead[i], eta);
        for (int d = 0; d < drops; ++d)
            out.mean_rate[i] += corrected[d][i] / (drops * cfg.noise.bin_width);
    }
    return out;
}

CsvTable noise_csv(const ScenarioConfig& cfg, const NoiseOutput& out) {
    CsvTable t("noise", config_hash(cfg), cfg.run.seed);
    t.add_column("time_s");
    t.add_column("mean_rate");
    t.add_column("f_raw");
    t.add_column("f_dead");
    t.add_column("f_corr");
    for (std::size_t i = 0; i < out.times.size(); ++i)
        t.add_row({out.times[i], out.mean_rate[i], out.f_raw[i], out.f_dead[i], out.f_corr[i]});
    return t;
}

PulseOutput run_pulse(const ScenarioConfig& cfg) {
    cfg.validate();
    auto geom = cfg.mode_geometry();
    auto rates = cfg.rates();
    const double v = cfg.probe_visibility();
    const double zf = cfg.transition.zeeman_factor;
    const int drops = cfg.run.drops_tof;
    const auto times = bin_centers(cfg.pulse.t_start, cfg.pulse.t_end, cfg.pulse.bin_width);

    ExcitationConfig exc;
    exc.turn_on = cfg.pulse.turn_on;
    exc.scatter_rate = cfg.pulse.scatter_rate;
    exc.pump_photon_budget = cfg.pulse.pump_photon_budget;
    exc.cavity_detuned = cfg.pulse.cavity_detuned;

    std::vector<std::vector<double>> emis(drops), ctot(drops);
    parallel_drops(drops, cfg.run.threads, [&](int d) {
        auto rng = substream(cfg.run.seed, 0x70750000ULL + static_cast<std::uint64_t>(d));
        std::vector<AtomSample> samples;
        if (!cfg.pulse.empty_cloud)
            samples = sample_cloud(cfg.cloud, geom, rng, cfg.pulse.sample_budget);
        auto res = simulate_pulse(samples, geom, rates, zf, exc, times, cfg.cloud.mass,
                                  cfg.transition.wavelength, rng);
        emis[d] = res.emission_weight;
        ctot[d] = res.trace.c_tot;
    });

    PulseOutput out;
    out.times = times;
    out.emission_weight.assign(times.size(), 0.0);
    out.fraction.assign(times.size(), 0.0);
    out.detected_rate.resize(times.size());
    const double eta = cfg.chain.net_efficiency();
    for (int d = 0; d < drops; ++d)
        for (std::size_t i = 0; i < times.size(); ++i) {
            out.emission_weight[i] += emis[d][i] / drops;
            out.fraction[i] += reflected_fraction_resonant(v, ctot[d][i]) / drops;
        }
    for (std::size_t i = 0; i < times.size(); ++i)
        out.detected_rate[i] = eta * out.emission_weight[i] / cfg.pulse.bin_width;
    return out;
}

CsvTable pulse_csv(const ScenarioConfig& cfg, const PulseOutput& out) {
    CsvTable t("pulse", config_hash(cfg), cfg.run.seed);
    t.add_column("time_s");
    t.add_column("emission_weight");
    t.add_column("detected_rate");
    t.add_column("fraction");
    for (std::size_t i = 0; i < out.times.size(); ++i)
        t.add_row({out.times[i], out.emission_weight[i], out.detected_rate[i], out.fraction[i]});
    return t;
}

}  // namespace cavsim
