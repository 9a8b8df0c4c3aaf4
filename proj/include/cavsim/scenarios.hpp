#ifndef CAVSIM_SCENARIOS_HPP
#define CAVSIM_SCENARIOS_HPP

#include <string>
#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/csv.hpp"
#include "cavsim/fitting.hpp"

namespace cavsim {

// Orchestration layer shared by the CLI and the test suites. Every run
// is deterministic in (config, seed) and independent of the thread
// count: drops use per-index RNG substreams and are reduced in index
// order.

std::string run_params(const ScenarioConfig& cfg);

struct TofOutput {
    std::vector<double> times;
    std::vector<double> n_eff;     // mean over drops
    std::vector<double> c_tot;
    std::vector<double> fraction;  // reflected fraction from the mean C_tot trace
    std::vector<double> counts;    // mean detected counts per bin
};
TofOutput run_tof(const ScenarioConfig& cfg);
CsvTable tof_csv(const ScenarioConfig& cfg, const TofOutput& out);

struct ScanOutput {
    std::vector<double> delta;
    std::vector<double> fraction;
    std::vector<double> sigma;
};
ScanOutput run_scan(const ScenarioConfig& cfg);
CsvTable scan_csv(const ScenarioConfig& cfg, const ScanOutput& out);
ScanDataset scan_to_dataset(const ScenarioConfig& cfg, const ScanOutput& out);

// Synthetic noisy scan: per (point, drop) one fluctuation-model draw and
// Poisson counting statistics at the probe rates.
ScanOutput synthetic_scan(double v, const FluctuationModel& model, double laser_fwhm,
                          const std::vector<double>& delta_grid, double i_max,
                          double integration_time, int drops, std::uint64_t seed);

struct NoiseOutput {
    std::vector<double> times;
    std::vector<double> mean_rate;  // detected counts/s after dead-time correction
    std::vector<double> f_raw;      // variance/mean of raw counts
    std::vector<double> f_dead;     // after dead-time correction
    std::vector<double> f_corr;     // after loss correction
};
NoiseOutput run_noise(const ScenarioConfig& cfg);
CsvTable noise_csv(const ScenarioConfig& cfg, const NoiseOutput& out);

struct PulseOutput {
    std::vector<double> times;
    std::vector<double> emission_weight;  // mean cavity emissions per bin
    std::vector<double> detected_rate;    // after the detection chain efficiency
    std::vector<double> fraction;         // probe reflection signal
};
PulseOutput run_pulse(const ScenarioConfig& cfg);
CsvTable pulse_csv(const ScenarioConfig& cfg, const PulseOutput& out);

FitConfig fit_config_from(const ScenarioConfig& cfg);

}  // namespace cavsim

#endif
