#include "cavsim/mode_field.hpp"

#include <cmath>

#include "cavsim/constants.hpp"

namespace cavsim {

void ModeGeometry::validate() const {
    if (!(waist > 0.0) || !(wavelength > 0.0) || !(length > 0.0))
        throw DomainError("mode geometry dimensions must be positive");
    double n2 = axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2];
    if (std::abs(n2 - 1.0) > 1e-9)
        throw DomainError("mode axis must be a unit vector");
}

double mode_intensity(const ModeGeometry& geom, const Vec3& r) {
    Vec3 d{r[0] - geom.origin[0], r[1] - geom.origin[1], r[2] - geom.origin[2]};
    double z = d[0] * geom.axis[0] + d[1] * geom.axis[1] + d[2] * geom.axis[2];
    if (std::abs(z) > 0.5 * geom.length) return 0.0;
    double rho2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - z * z;
    if (rho2 < 0.0) rho2 = 0.0;  // rounding
    double k = constants::two_pi / geom.wavelength;
    double ax = std::cos(k * z);
    return ax * ax * std::exp(-2.0 * rho2 / (geom.waist * geom.waist));
}

EnsembleCoupling aggregate_coupling(double cooperativity,
                                    const std::vector<double>& intensities,
                                    double zeeman_factor) {
    if (cooperativity < 0.0) throw DomainError("cooperativity must be non-negative");
    double sum = 0.0;
    for (double i : intensities) {
        if (!(i >= 0.0 && i <= 1.0)) throw DomainError("mode intensity outside [0,1]");
        sum += i;
    }
    return {zeeman_factor * cooperativity * sum, sum};
}

EnsembleCoupling aggregate_coupling_weighted(double cooperativity,
                                             const std::vector<double>& intensities,
                                             const std::vector<double>& weights,
                                             double zeeman_factor) {
    if (cooperativity < 0.0) throw DomainError("cooperativity must be non-negative");
    if (intensities.size() != weights.size())
        throw DomainError("intensity/weight size mismatch");
    double sum = 0.0;
    for (std::size_t n = 0; n < intensities.size(); ++n) {
        double i = intensities[n];
        if (!(i >= 0.0 && i <= 1.0)) throw DomainError("mode intensity outside [0,1]");
        sum += weights[n] * i;
    }
    return {zeeman_factor * cooperativity * sum, sum};
}

}  // namespace cavsim
