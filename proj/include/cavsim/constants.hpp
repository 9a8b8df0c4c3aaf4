#ifndef CAVSIM_CONSTANTS_HPP
#define CAVSIM_CONSTANTS_HPP

namespace cavsim::constants {

// CODATA 2018
inline constexpr double c_light = 2.99792458e8;       // m/s
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double g_earth = 9.80665;            // m/s^2
inline constexpr double amu = 1.66053906660e-27;      // kg

// Rb-85 D2 line
inline constexpr double rb85_mass = 84.911789738 * amu;
inline constexpr double rb85_d2_wavelength = 780.241e-9;  // m
// half-linewidth convention: natural decay rate of the excited
// population is 2*gamma = 2*pi*6 MHz
inline constexpr double rb85_d2_gamma = 2.0 * 3.141592653589793 * 3.0e6;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace cavsim::constants

#endif
