#ifndef CAVSIM_DETECTOR_CHAIN_HPP
#define CAVSIM_DETECTOR_CHAIN_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cavsim/cavity_core.hpp"
#include "cavsim/errors.hpp"

namespace cavsim {

struct DetectionChainSpec {
    double beamsplitter_transmission = 0.9;
    double detector_efficiency = 0.6;
    double dead_time = 44e-9;  // s, non-paralyzable

    double net_efficiency() const { return beamsplitter_transmission * detector_efficiency; }
    void validate() const;
};

struct CountSeries {
    double bin_width;                 // s
    std::vector<double> counts;       // integer-valued unless corrected
    int trials = 1;
    bool dead_time_corrected = false;
    bool loss_corrected = false;
};

// Inhomogeneous Poisson arrivals at rate(t), thinned by the net
// efficiency, filtered by non-paralyzable dead time, then binned.
CountSeries generate_counts(const std::function<double(double)>& rate, double rate_max,
                            const DetectionChainSpec& chain, double bin_width, double duration,
                            std::mt19937_64& rng);

// Constant-rate convenience overload.
CountSeries generate_counts(double rate, const DetectionChainSpec& chain, double bin_width,
                            double duration, std::mt19937_64& rng);

// Invert the non-paralyzable dead-time compression: n = r / (1 - r tau).
CountSeries dead_time_correct(const CountSeries& series, double dead_time);

// Per-bin variance-to-mean over trials. Bins with zero mean are masked
// (NaN). Rows of `per_trial` are trials, all with equal length.
std::vector<double> fano(const std::vector<std::vector<double>>& per_trial);

// f_corr = 1 + (f - 1) / eta
double loss_correct_fano(double f, double eta);

struct JitterNoiseResult {
    double excess_fano;      // added variance-to-mean from cavity length jitter
    double fraction_mean;    // mean reflected fraction at the lock point
    double fraction_var;     // variance of the reflected fraction
};

// Excess photon noise from Gaussian cavity-length jitter around a lock
// offset, propagated through the Lorentzian cavity response of
// half-width kappa. Second-order sensitivity expansion by default, with
// a Monte Carlo option for validation.
JitterNoiseResult cavity_jitter_noise(double v, double c_tot, double length_jitter_rms,
                                      const CavitySpec& spec, double photon_flux,
                                      double bin_width, double lock_offset_length = 0.0,
                                      bool monte_carlo = false, std::uint64_t seed = 0,
                                      int mc_samples = 200000);

// Reflected fraction versus cavity detuning delta_c (rad/s): the dip
// term acquires the Lorentzian cavity response of half-width kappa.
double reflected_fraction_cavity_detuned(double v, double c_tot, double delta_c, double kappa);

}  // namespace cavsim

#endif
