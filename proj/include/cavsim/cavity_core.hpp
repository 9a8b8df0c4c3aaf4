#ifndef CAVSIM_CAVITY_CORE_HPP
#define CAVSIM_CAVITY_CORE_HPP

#include "cavsim/constants.hpp"
#include "cavsim/errors.hpp"

namespace cavsim {

// Atomic transition. gamma is HALF the population decay rate, so the
// natural decay rate is 2*gamma. zeeman_factor averages the transition
// strength over the ground-state sublevels (3/7 for Rb85 F=3).
struct TransitionSpec {
    double wavelength;     // m
    double gamma;          // rad/s, half-linewidth
    double zeeman_factor;  // dimensionless, in (0, 1]
    double mu = 0.0;       // C m; 0 means "derive from gamma"

    double omega() const { return constants::two_pi * constants::c_light / wavelength; }
    void validate() const;

    static TransitionSpec rb85_d2();
};

struct CavitySpec {
    double length;   // m
    double finesse;  // dimensionless
    double waist;    // m
    double omega_c;  // rad/s

    void validate() const;
};

// g and kappa are half the vacuum Rabi frequency and half the cavity
// power decay rate respectively; C = g^2 / (2 kappa gamma) by construction.
class CouplingRates {
public:
    CouplingRates(double g, double kappa, double gamma);

    double g() const { return g_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }
    double cooperativity() const { return coop_; }

private:
    double g_, kappa_, gamma_, coop_;
};

enum class ModeVolumeConvention { traveling_gaussian, standing_gaussian };

struct ModeVolumeResult {
    double volume;  // m^3
    ModeVolumeConvention convention;
};

struct EnhancedDecay {
    double total;      // 2*gamma*(1 + 2*C_tot), rad/s
    double into_mode;  // 4*C_tot*gamma, rad/s
};

// kappa = pi c / (2 L F)
double kappa_from_geometry(const CavitySpec& spec);

// g such that 2g = mu * sqrt(omega_c / (2 hbar eps0 V))
double vacuum_rabi(double mu, double omega_c, double mode_volume);

double cooperativity(double g, double kappa, double gamma);

EnhancedDecay enhanced_decay_rate(double gamma, double c_tot);

ModeVolumeResult mode_volume(const CavitySpec& spec, ModeVolumeConvention conv);

// mu^2 = 3 pi eps0 hbar c^3 (2 gamma) / omega^3  (radiative-decay relation)
double dipole_from_gamma(double gamma, double omega);

}  // namespace cavsim

#endif
