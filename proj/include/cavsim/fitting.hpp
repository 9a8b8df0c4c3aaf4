#ifndef CAVSIM_FITTING_HPP
#define CAVSIM_FITTING_HPP

#include <string>
#include <vector>

#include "cavsim/reflection.hpp"

namespace cavsim {

struct ScanDataset {
    std::vector<double> delta;      // laser-atom detuning in units of gamma
    std::vector<double> fraction;   // reflected fraction I_atoms / I_max
    std::vector<double> sigma;      // per-point uncertainty
    double v;                       // empty-cavity visibility (fixed)
    double single_atom_c;
    double zeeman_factor;

    void validate() const;
};

struct FitConfig {
    bool float_visibility = false;
    bool float_linewidth = false;
    double laser_fwhm = 0.0;      // units of gamma; fixed value or initial guess
    double initial_n_eff = -1.0;  // < 0: warm start from the point nearest delta = 0
    int max_iterations = 200;
    double step_tol = 1e-6;
    double box_halfwidth_waists = 1.0;
    LineshapeConfig lineshape;
};

struct FitResult {
    double n_eff = 0.0;
    double n_eff_se = 0.0;
    double visibility = 0.0;      // fitted or fixed
    double linewidth = 0.0;       // fitted or fixed
    double chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
};

// Weighted least squares of the averaged detuning lineshape against the
// scan data. Damped Gauss-Newton; stops on relative step < step_tol.
FitResult fit_scan(const ScanDataset& data, const FitConfig& cfg);

struct ProfileInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool open_lower = false;  // profile failed to bracket below
    bool open_upper = false;
    bool clipped_at_zero = false;
};

// Delta-chi-square = 1 profile over <N_eff>, nuisance parameters held at
// their fitted values.
ProfileInterval profile_uncertainty(const FitResult& result, const ScanDataset& data,
                                    const FitConfig& cfg);

}  // namespace cavsim

#endif
