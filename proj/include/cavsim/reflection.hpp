#ifndef CAVSIM_REFLECTION_HPP
#define CAVSIM_REFLECTION_HPP

#include <cstdint>
#include <vector>

#include "cavsim/errors.hpp"

namespace cavsim {

struct CountRateTriple {
    double i_max;    // counts/s, cavity far from resonance
    double i_min;    // counts/s, empty cavity on resonance
    double i_atoms;  // counts/s, peak with atoms

    void validate() const;
};

struct InversionResult {
    double visibility;
    double c_tot;
    double n_eff;
};

// v = 1 - sqrt(I_min / I_max)
double visibility(double i_min, double i_max);

// On-resonance reflected fraction (-1 + v/P_tot)^2 with P_tot = 2 C_tot + 1.
double reflected_fraction_resonant(double v, double c_tot);

// Reflected fraction versus laser-atom detuning delta (in units of gamma),
// valid for g/gamma >> (1, delta). Reduces to the resonant form at delta = 0.
double reflected_fraction_detuned(double v, double c_tot, double delta);

// Model validity guard: the detuned lineshape assumes g/gamma >> delta.
bool detuning_in_validity_range(double delta, double g, double gamma);

// Solve the on-resonance model for C_tot from measured count rates,
// then N_eff = C_tot / (zeeman_factor * C).
InversionResult invert_to_cooperativity(const CountRateTriple& counts,
                                        double single_atom_c,
                                        double zeeman_factor);

// Drop-to-drop fluctuation model behind the averaged lineshape: atom
// number Poisson in a reference box around the mode, per-atom intensity
// from uniform axial phase and a uniform transverse offset within
// box_halfwidth_waists waists of the axis.
struct FluctuationModel {
    double mean_n_eff;
    double single_atom_c;
    double zeeman_factor;
    double box_halfwidth_waists = 1.0;
};

enum class AveragingMethod { quadrature, monte_carlo };

struct LineshapeConfig {
    AveragingMethod method = AveragingMethod::quadrature;
    int mc_replicas = 4000;
    std::uint64_t seed = 0;
    int intensity_bins = 256;   // quadrature grid on the per-atom intensity
    int max_atoms = 0;          // 0: choose from the Poisson mean
    int hermite_order = 16;     // laser-lineshape convolution
};

// Expectation of reflected_fraction_detuned over the fluctuation model,
// convolved with a Gaussian laser lineshape of the given FWHM (in units
// of gamma). Precomputes everything that does not depend on mean_n_eff,
// so repeated evaluation during fitting is cheap.
class LineshapeAverager {
public:
    LineshapeAverager(double v, const FluctuationModel& model, double laser_fwhm_delta,
                      std::vector<double> delta_grid, const LineshapeConfig& cfg = {});

    // Curve over the delta grid for the given mean effective atom number.
    std::vector<double> curve(double mean_n_eff) const;

    std::vector<double> curve() const { return curve(model_.mean_n_eff); }

    const std::vector<double>& delta_grid() const { return delta_grid_; }
    double mean_single_atom_intensity() const { return mean_intensity_; }

private:
    std::vector<double> curve_quadrature(double mean_n_eff) const;
    std::vector<double> curve_monte_carlo(double mean_n_eff) const;

    double v_;
    FluctuationModel model_;
    double laser_fwhm_;
    std::vector<double> delta_grid_;
    LineshapeConfig cfg_;

    double mean_intensity_;         // E[I] for one atom in the box
    std::vector<double> atom_pdf_;  // per-atom intensity pmf on [0,1]
    int max_atoms_;
    // cond_mean_[n * grid + j]: E[reflected fraction | n atoms] at grid
    // point j, already convolved with the laser lineshape.
    std::vector<double> cond_mean_;
};

// One-shot convenience wrapper.
std::vector<double> averaged_lineshape(double v, const FluctuationModel& model,
                                       double laser_fwhm_delta,
                                       const std::vector<double>& delta_grid,
                                       const LineshapeConfig& cfg = {});

// Gauss-Hermite rule for weight exp(-x^2); weights sum to sqrt(pi).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace cavsim

#endif
