#ifndef CAVSIM_RNG_HPP
#define CAVSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace cavsim {

// Deterministic substream derivation: mixing (master seed, stream index)
// through splitmix64 gives independent, reproducible engines no matter
// how drops are distributed over threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ stream_index));
}

// Standard normal quantile (Acklam's rational approximation plus one
// Halley refinement; good to ~1e-15 over (0,1)).
double normal_quantile(double p);

double normal_cdf(double x);

// Sample from N(0, sigma) truncated to [lo, hi]; u is uniform in (0,1).
double truncated_normal(double sigma, double lo, double hi, double u);

}  // namespace cavsim

#endif
