#ifndef CAVSIM_MODE_FIELD_HPP
#define CAVSIM_MODE_FIELD_HPP

#include <array>
#include <vector>

#include "cavsim/errors.hpp"

namespace cavsim {

using Vec3 = std::array<double, 3>;

// Standing-wave Gaussian mode. Waist is treated as constant along the
// axis; an antinode sits at the mode center.
struct ModeGeometry {
    Vec3 origin{0.0, 0.0, 0.0};
    Vec3 axis{1.0, 0.0, 0.0};  // unit vector, default horizontal
    double waist;              // m
    double wavelength;         // m
    double length;             // m, mode extent along the axis

    void validate() const;
};

struct EnsembleCoupling {
    double c_tot;
    double n_eff;
};

// Fraction of peak intensity at r: cos^2 along the axis times the
// transverse Gaussian. Zero beyond the mirror positions |z| > L/2.
double mode_intensity(const ModeGeometry& geom, const Vec3& r);

// C_tot = zeeman_factor * C * sum(I_n); N_eff = sum(I_n).
EnsembleCoupling aggregate_coupling(double cooperativity,
                                    const std::vector<double>& intensities,
                                    double zeeman_factor);

// Weighted variant used by the Monte Carlo: each intensity counts as
// `weight` atoms.
EnsembleCoupling aggregate_coupling_weighted(double cooperativity,
                                             const std::vector<double>& intensities,
                                             const std::vector<double>& weights,
                                             double zeeman_factor);

}  // namespace cavsim

#endif
