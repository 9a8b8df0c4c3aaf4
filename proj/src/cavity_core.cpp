#include "cavsim/cavity_core.hpp"

#include <cmath>

namespace cavsim {

namespace {

void require_positive_finite(double x, const char* name) {
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError(std::string(name) + " must be positive and finite");
}

}  // namespace

void TransitionSpec::validate() const {
    require_positive_finite(wavelength, "wavelength");
    require_positive_finite(gamma, "gamma");
    if (!(zeeman_factor > 0.0 && zeeman_factor <= 1.0))
        throw DomainError("zeeman_factor must be in (0, 1]");
    if (mu < 0.0 || !std::isfinite(mu))
        throw DomainError("dipole moment must be finite and non-negative");
}

TransitionSpec TransitionSpec::rb85_d2() {
    TransitionSpec t;
    t.wavelength = constants::rb85_d2_wavelength;
    t.gamma = constants::rb85_d2_gamma;
    t.zeeman_factor = 3.0 / 7.0;
    t.mu = dipole_from_gamma(t.gamma, t.omega());
    return t;
}

void CavitySpec::validate() const {
    require_positive_finite(length, "cavity length");
    require_positive_finite(waist, "cavity waist");
    require_positive_finite(omega_c, "cavity frequency");
    if (!std::isfinite(finesse) || finesse < 1.0)
        throw DomainError("finesse must be >= 1");
}

CouplingRates::CouplingRates(double g, double kappa, double gamma)
    : g_(g), kappa_(kappa), gamma_(gamma) {
    if (!std::isfinite(g) || g < 0.0) throw DomainError("g must be non-negative");
    require_positive_finite(kappa, "kappa");
    require_positive_finite(gamma, "gamma");
    coop_ = g_ * g_ / (2.0 * kappa_ * gamma_);
}

double kappa_from_geometry(const CavitySpec& spec) {
    spec.validate();
    return constants::pi * constants::c_light / (2.0 * spec.length * spec.finesse);
}

double vacuum_rabi(double mu, double omega_c, double mode_volume) {
    require_positive_finite(mu, "dipole moment");
    require_positive_finite(omega_c, "omega_c");
    require_positive_finite(mode_volume, "mode volume");
    return 0.5 * mu * std::sqrt(omega_c / (2.0 * constants::hbar * constants::eps0 * mode_volume));
}

double cooperativity(double g, double kappa, double gamma) {
    if (!std::isfinite(g) || g < 0.0) throw DomainError("g must be non-negative");
    require_positive_finite(kappa, "kappa");
    require_positive_finite(gamma, "gamma");
    return g * g / (2.0 * kappa * gamma);
}

EnhancedDecay enhanced_decay_rate(double gamma, double c_tot) {
    require_positive_finite(gamma, "gamma");
    if (!std::isfinite(c_tot) || c_tot < 0.0)
        throw DomainError("C_tot must be non-negative");
    return {2.0 * gamma * (1.0 + 2.0 * c_tot), 4.0 * c_tot * gamma};
}

ModeVolumeResult mode_volume(const CavitySpec& spec, ModeVolumeConvention conv) {
    spec.validate();
    double v = constants::pi / 4.0 * spec.waist * spec.waist * spec.length;
    if (conv == ModeVolumeConvention::standing_gaussian) v *= 0.5;
    return {v, conv};
}

double dipole_from_gamma(double gamma, double omega) {
    require_positive_finite(gamma, "gamma");
    require_positive_finite(omega, "omega");
    const double c3 = std::pow(constants::c_light, 3);
    double mu2 = 3.0 * constants::pi * constants::eps0 * constants::hbar * c3 * (2.0 * gamma) /
                 std::pow(omega, 3);
    return std::sqrt(mu2);
}

}  // namespace cavsim
