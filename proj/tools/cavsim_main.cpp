#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavsim/cloud_mc.hpp"
#include "cavsim/config.hpp"
#include "cavsim/csv.hpp"
#include "cavsim/errors.hpp"
#include "cavsim/scenarios.hpp"

namespace {

struct GlobalOpts {
    std::string config_path;
    std::int64_t seed = -1;
    int drops = 0;
    std::string out_dir;
    int threads = 0;
};

cavsim::ScenarioConfig effective_config(const GlobalOpts& g) {
    cavsim::ScenarioConfig cfg =
        g.config_path.empty() ? cavsim::default_config() : cavsim::load_config(g.config_path);
    if (g.seed >= 0) cfg.run.seed = static_cast<std::uint64_t>(g.seed);
    if (g.drops > 0) {
        cfg.run.drops_tof = g.drops;
        cfg.run.drops_noise = g.drops;
    }
    if (!g.out_dir.empty()) cfg.run.out_dir = g.out_dir;
    if (g.threads > 0) cfg.run.threads = g.threads;
    cfg.validate();
    return cfg;
}

std::string out_path(const cavsim::ScenarioConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.run.out_dir);
    return (std::filesystem::path(cfg.run.out_dir) / name).string();
}

void warn_scan_validity(const cavsim::ScenarioConfig& cfg) {
    double worst = std::max(std::abs(cfg.scan.delta_min), std::abs(cfg.scan.delta_max));
    if (!cavsim::detuning_in_validity_range(worst, cfg.g, cfg.transition.gamma))
        std::cerr << "warning: |detuning| up to " << worst
                  << " gamma exceeds 0.3 g/gamma; the lineshape model assumes g/gamma >> delta\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microcavity single-atom detection simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--seed", g.seed, "Master RNG seed (overrides config)");
    app.add_option("--drops", g.drops, "Number of cloud drops (overrides config)");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads (does not affect results)");

    auto* sc_params = app.add_subcommand("params", "Print derived cavity-QED rates");
    auto* sc_tof = app.add_subcommand("tof", "Time-of-flight transit simulation");
    auto* sc_scan = app.add_subcommand("scan", "Reflected fraction versus detuning");
    bool scan_fit = false;
    sc_scan->add_flag("--fit", scan_fit, "Fit the generated scan and report <N_eff>");
    auto* sc_noise = app.add_subcommand("noise", "Photon-count Fano-factor pipeline");
    auto* sc_pulse = app.add_subcommand("pulse", "Purcell-enhanced emission pulse");
    auto* sc_fit = app.add_subcommand("fit", "Fit a scan CSV for <N_eff>");
    std::string fit_input;
    sc_fit->add_option("input", fit_input, "scan CSV file")->required();
    auto* sc_cal = app.add_subcommand("calibrate", "Scale atom_count to the target peak N_eff");
    double cal_target = 0.7;
    sc_cal->add_option("--target", cal_target, "Target peak <N_eff>");
    auto* sc_config = app.add_subcommand("config", "Configuration utilities");
    auto* sc_dump = sc_config->add_subcommand("dump", "Print the effective configuration");
    sc_config->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        cavsim::ScenarioConfig cfg = effective_config(g);

        if (sc_params->parsed()) {
            std::cout << cavsim::run_params(cfg);
        } else if (sc_tof->parsed()) {
            auto out = cavsim::run_tof(cfg);
            auto csv = cavsim::tof_csv(cfg, out);
            std::string path = out_path(cfg, "tof.csv");
            csv.write(path);
            std::cout << "wrote " << path << "\n";
        } else if (sc_scan->parsed()) {
            warn_scan_validity(cfg);
            auto out = cavsim::run_scan(cfg);
            auto csv = cavsim::scan_csv(cfg, out);
            std::string path = out_path(cfg, "scan.csv");
            csv.write(path);
            std::cout << "wrote " << path << "\n";
            if (scan_fit) {
                auto data = cavsim::scan_to_dataset(cfg, out);
                auto res = cavsim::fit_scan(data, cavsim::fit_config_from(cfg));
                std::printf("n_eff = %.6g +- %.3g (chi2/dof = %.3g/%d, %d iterations)\n",
                            res.n_eff, res.n_eff_se, res.chi2, res.dof, res.iterations);
            }
        } else if (sc_noise->parsed()) {
            auto out = cavsim::run_noise(cfg);
            auto csv = cavsim::noise_csv(cfg, out);
            std::string path = out_path(cfg, "noise.csv");
            csv.write(path);
            std::cout << "wrote " << path << "\n";
        } else if (sc_pulse->parsed()) {
            auto out = cavsim::run_pulse(cfg);
            auto csv = cavsim::pulse_csv(cfg, out);
            std::string path = out_path(cfg, "pulse.csv");
            csv.write(path);
            std::cout << "wrote " << path << "\n";
        } else if (sc_fit->parsed()) {
            std::vector<std::vector<double>> cols;
            auto names = cavsim::read_csv(fit_input, cols);
            if (names.size() < 3 || names[0] != "delta_la")
                throw cavsim::ConfigError("expected a scan CSV (delta_la,fraction,sigma)");
            cavsim::ScanOutput scan{cols[0], cols[1], cols[2]};
            auto data = cavsim::scan_to_dataset(cfg, scan);
            auto res = cavsim::fit_scan(data, cavsim::fit_config_from(cfg));
            auto prof = cavsim::profile_uncertainty(res, data, cavsim::fit_config_from(cfg));
            std::printf("n_eff = %.6g +- %.3g\n", res.n_eff, res.n_eff_se);
            std::printf("profile (dchi2=1): [%.6g, %.6g]%s\n", prof.lower, prof.upper,
                        prof.clipped_at_zero ? " (clipped at 0)" : "");
            std::printf("chi2/dof = %.4g/%d, converged in %d iterations\n", res.chi2, res.dof,
                        res.iterations);
        } else if (sc_cal->parsed()) {
            auto res = cavsim::calibrate_cloud(cfg.cloud, cfg.mode_geometry(), cfg.rates(),
                                               cfg.transition.zeeman_factor, cfg.run.seed,
                                               cfg.tof.sample_budget, cfg.run.drops_tof,
                                               cal_target);
            std::printf("peak n_eff      = %.4g at t = %.4g s (uncalibrated)\n", res.peak_n_eff,
                        res.peak_time);
            std::printf("scale factor    = %.6g\n", res.factor);
            std::printf("atom_count      = %.6g (calibrated)\n", res.calibrated.atom_count);
        } else if (sc_dump->parsed()) {
            std::cout << cavsim::dump_config(cfg) << "\n";
        }
    } catch (const cavsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cavsim::ConvergenceError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const cavsim::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
