#ifndef CAVSIM_CONFIG_HPP
#define CAVSIM_CONFIG_HPP

#include <cstdint>
#include <string>

#include "cavsim/cavity_core.hpp"
#include "cavsim/cloud_mc.hpp"
#include "cavsim/detector_chain.hpp"
#include "cavsim/errors.hpp"

namespace cavsim {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ProbeConfig {
    double i_max = 419e3;  // counts/s far from cavity resonance
    double i_min = 272e3;  // counts/s on resonance, empty cavity
};

struct ScanConfig {
    double delta_min = -15.0;
    double delta_max = 15.0;
    int points = 31;
    double laser_fwhm = 0.0;      // units of gamma
    double mean_n_eff = 0.7;
    double box_halfwidth_waists = 1.0;
    bool noisy = false;           // Poisson noise at the probe count rates
    double integration_time = 250e-6;  // s per drop and point
};

struct TofConfig {
    double t_start = 30e-3;
    double t_end = 46e-3;
    double bin_width = 250e-6;
    std::size_t sample_budget = 20000;
};

struct NoiseConfig {
    double t_start = 30e-3;
    double t_end = 46e-3;
    double bin_width = 10e-6;
    std::size_t sample_budget = 5000;
    double length_jitter_rms = 0.0;  // m
    double lock_offset = 0.0;        // m
};

struct PulseConfig {
    double turn_on = 38e-3;
    double t_start = 36e-3;
    double t_end = 40e-3;
    double bin_width = 50e-6;
    double scatter_rate = 1e7;
    double pump_photon_budget = 3.0;
    bool cavity_detuned = false;
    bool empty_cloud = false;
    std::size_t sample_budget = 5000;
};

struct FitSectionConfig {
    bool float_visibility = false;
    bool float_linewidth = false;
};

struct RunConfig {
    std::uint64_t seed = 12345;
    int drops_tof = 34;
    int drops_noise = 48;
    int threads = 1;
    std::string out_dir = ".";
};

struct ScenarioConfig {
    TransitionSpec transition;
    CavitySpec cavity;
    double g = 0.0;  // rad/s, configured coupling (2g is the vacuum Rabi frequency)
    CloudSpec cloud;
    DetectionChainSpec chain;
    ProbeConfig probe;
    ScanConfig scan;
    TofConfig tof;
    NoiseConfig noise;
    PulseConfig pulse;
    FitSectionConfig fit;
    RunConfig run;

    CouplingRates rates() const;
    ModeGeometry mode_geometry() const;
    double probe_visibility() const;
    void validate() const;
};

ScenarioConfig default_config();

// Strict parse: unknown keys anywhere are errors.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

// Canonical round-trippable dump.
std::string dump_config(const ScenarioConfig& cfg);

// FNV-1a over the canonical dump; stamped into every CSV header.
std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace cavsim

#endif
