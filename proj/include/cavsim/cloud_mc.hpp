#ifndef CAVSIM_CLOUD_MC_HPP
#define CAVSIM_CLOUD_MC_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "cavsim/cavity_core.hpp"
#include "cavsim/constants.hpp"
#include "cavsim/mode_field.hpp"

namespace cavsim {

struct CloudSpec {
    double atom_count = 2e7;
    double drop_height = 7e-3;   // m, cloud center above the mode center
    double rms_radius = 0.5e-3;  // m
    double temperature = 10e-6;  // K
    double mass = constants::rb85_mass;

    void validate() const;
};

enum class InternalState { bright, dark };

// One weighted sample standing in for `weight` physical atoms.
struct AtomSample {
    Vec3 position;
    Vec3 velocity;
    double weight;
    InternalState state = InternalState::bright;
};

struct TransitTrace {
    std::vector<double> times;
    std::vector<double> c_tot;
    std::vector<double> n_eff;
    std::vector<double> bright_weight;  // weighted count of bright atoms
};

// Importance-sampled cloud draw: positions Gaussian, velocities
// Maxwell-Boltzmann, but the horizontal coordinates are conditioned on
// the trajectory crossing an acceptance window around the mode at the
// fall-through time, with weights carrying the window probability mass.
// Requires the mode axis to be x-hat (the default geometry).
std::vector<AtomSample> sample_cloud(const CloudSpec& spec, const ModeGeometry& geom,
                                     std::mt19937_64& rng, std::size_t sample_budget);

// Plain unweighted draw from the full cloud; the brute-force
// counterpart of sample_cloud used for cross-checks.
std::vector<AtomSample> sample_cloud_direct(const CloudSpec& spec, const ModeGeometry& geom,
                                            std::mt19937_64& rng, std::size_t sample_budget);

// Acceptance window half-widths at the mode plane (axial, transverse).
// Exposed so the rejection-sampling cross-check counts the same region.
void acceptance_window(const CloudSpec& spec, const ModeGeometry& geom, double& half_axial,
                       double& half_transverse);

AtomSample propagate(const AtomSample& s, double t, double gravity = constants::g_earth);

std::vector<AtomSample> propagate(const std::vector<AtomSample>& samples, double t,
                                  double gravity = constants::g_earth);

TransitTrace transit_trace(const std::vector<AtomSample>& samples, const ModeGeometry& geom,
                           const CouplingRates& rates, double zeeman_factor,
                           const std::vector<double>& times,
                           double gravity = constants::g_earth);

struct ExcitationConfig {
    double turn_on;                  // s, relative to release
    double scatter_rate = 1.0e7;    // photon scatters per second while bright
    double pump_photon_budget = 3;  // mean scatters before falling dark
    Vec3 beam_dir{0.0, 0.0, 1.0};   // excitation pushes from below
    bool cavity_detuned = false;    // detuned cavity collects nothing
};

struct PulseResult {
    TransitTrace trace;                     // C_tot etc. over the full grid
    std::vector<double> emission_weight;    // cavity emissions per time bin
    std::vector<AtomSample> final_samples;  // state at the last grid time
};

// Free fall followed by pulsed excitation: from turn_on each bright atom
// scatters at scatter_rate, emits into the cavity with branching
// 2 C_loc / (1 + 2 C_loc), takes one recoil per scatter, and falls dark
// after a geometric number of scatters.
PulseResult simulate_pulse(const std::vector<AtomSample>& initial, const ModeGeometry& geom,
                           const CouplingRates& rates, double zeeman_factor,
                           const ExcitationConfig& exc, const std::vector<double>& times,
                           double atom_mass, double wavelength, std::mt19937_64& rng,
                           double gravity = constants::g_earth);

struct CalibrationResult {
    double factor;        // atom_count multiplier
    double peak_n_eff;    // before calibration
    double peak_time;     // s
    CloudSpec calibrated;
};

// Scale atom_count so the simulated peak <N_eff> hits the target.
CalibrationResult calibrate_cloud(const CloudSpec& spec, const ModeGeometry& geom,
                                  const CouplingRates& rates, double zeeman_factor,
                                  std::uint64_t seed, std::size_t sample_budget,
                                  int drops, double target_peak_n_eff,
                                  double gravity = constants::g_earth);

}  // namespace cavsim

#endif
