#include "cavsim/detector_chain.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "cavsim/rng.hpp"

namespace cavsim {

void DetectionChainSpec::validate() const {
    if (!(beamsplitter_transmission > 0.0 && beamsplitter_transmission <= 1.0))
        throw DomainError("beamsplitter transmission must be in (0,1]");
    if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0))
        throw DomainError("detector efficiency must be in (0,1]");
    if (!(dead_time >= 0.0)) throw DomainError("dead time must be non-negative");
}

CountSeries generate_counts(const std::function<double(double)>& rate, double rate_max,
                            const DetectionChainSpec& chain, double bin_width, double duration,
                            std::mt19937_64& rng) {
    chain.validate();
    if (!(bin_width > 0.0)) throw DomainError("bin width must be positive");
    if (!(duration > 0.0)) throw DomainError("duration must be positive");
    if (!(rate_max >= 0.0)) throw DomainError("rate bound must be non-negative");

    CountSeries series;
    series.bin_width = bin_width;
    std::size_t n_bins = static_cast<std::size_t>(std::ceil(duration / bin_width));
    series.counts.assign(n_bins, 0.0);
    if (rate_max == 0.0) return series;

    const double eta = chain.net_efficiency();
    std::exponential_distribution<double> expo(rate_max);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double t = 0.0;
    double blocked_until = -1.0;
    while (true) {
        t += expo(rng);
        if (t >= duration) break;
        double r = rate(t);
        if (r < 0.0) throw DomainError("negative rate");
        if (uni(rng) * rate_max >= r) continue;  // thinning to R(t)
        if (uni(rng) >= eta) continue;           // losses
        if (t < blocked_until) continue;         // dead time
        blocked_until = t + chain.dead_time;
        std::size_t b = static_cast<std::size_t>(t / bin_width);
        if (b < n_bins) series.counts[b] += 1.0;
    }
    return series;
}

CountSeries generate_counts(double rate, const DetectionChainSpec& chain, double bin_width,
                            double duration, std::mt19937_64& rng) {
    return generate_counts([rate](double) { return rate; }, rate, chain, bin_width, duration,
                           rng);
}

CountSeries dead_time_correct(const CountSeries& series, double dead_time) {
    if (!(dead_time >= 0.0)) throw DomainError("dead time must be non-negative");
    CountSeries out = series;
    out.dead_time_corrected = true;
    for (auto& c : out.counts) {
        double r = c / series.bin_width;
        double x = r * dead_time;
        if (x >= 1.0) throw DomainError("dead-time correction saturated: r*tau >= 1");
        c = r / (1.0 - x) * series.bin_width;
    }
    return out;
}

std::vector<double> fano(const std::vector<std::vector<double>>& per_trial) {
    if (per_trial.size() < 2) throw DomainError("fano needs at least 2 trials");
    std::size_t n_bins = per_trial.front().size();
    for (const auto& t : per_trial)
        if (t.size() != n_bins) throw DomainError("trials have unequal bin counts");

    const double n = static_cast<double>(per_trial.size());
    std::vector<double> out(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        double mean = 0.0;
        for (const auto& t : per_trial) mean += t[b];
        mean /= n;
        if (mean == 0.0) {
            out[b] = std::numeric_limits<double>::quiet_NaN();  // masked
            continue;
        }
        double var = 0.0;
        for (const auto& t : per_trial) var += (t[b] - mean) * (t[b] - mean);
        var /= (n - 1.0);
        out[b] = var / mean;
    }
    return out;
}

double loss_correct_fano(double f, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("efficiency must be in (0,1]");
    return 1.0 + (f - 1.0) / eta;
}

double reflected_fraction_cavity_detuned(double v, double c_tot, double delta_c, double kappa) {
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("visibility must be in (0,1]");
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    double p_tot = 2.0 * c_tot + 1.0;
    std::complex<double> lorentz = 1.0 / std::complex<double>(1.0, delta_c / kappa);
    std::complex<double> r = -1.0 + (v / p_tot) * lorentz;
    return std::norm(r);
}

JitterNoiseResult cavity_jitter_noise(double v, double c_tot, double length_jitter_rms,
                                      const CavitySpec& spec, double photon_flux,
                                      double bin_width, double lock_offset_length,
                                      bool monte_carlo, std::uint64_t seed, int mc_samples) {
    spec.validate();
    if (!(length_jitter_rms >= 0.0)) throw DomainError("jitter rms must be non-negative");
    double kappa = kappa_from_geometry(spec);
    // length to frequency: delta_omega / omega = -delta_L / L
    const double dwdl = -spec.omega_c / spec.length;
    const double delta0 = lock_offset_length * dwdl;
    const double sigma_w = length_jitter_rms * std::abs(dwdl);

    auto frac = [&](double d) { return reflected_fraction_cavity_detuned(v, c_tot, d, kappa); };

    JitterNoiseResult res{};
    if (length_jitter_rms == 0.0) {
        res.fraction_mean = frac(delta0);
        res.fraction_var = 0.0;
        res.excess_fano = 0.0;
        return res;
    }

    if (monte_carlo) {
        auto rng = substream(seed, 0x6a697474);
        std::normal_distribution<double> gauss(0.0, sigma_w);
        double m = 0.0, m2 = 0.0;
        for (int i = 0; i < mc_samples; ++i) {
            double f = frac(delta0 + gauss(rng));
            m += f;
            m2 += f * f;
        }
        m /= mc_samples;
        m2 /= mc_samples;
        res.fraction_mean = m;
        res.fraction_var = m2 - m * m;
    } else {
        // variance of the quadratic response F(d0) + F' x + F'' x^2 / 2,
        // x ~ N(0, sigma): Var = F'^2 sigma^2 + F''^2 sigma^4 / 2
        double hstep = std::max(1e-4 * kappa, 0.1 * sigma_w);
        double f0 = frac(delta0);
        double fp = (frac(delta0 + hstep) - frac(delta0 - hstep)) / (2.0 * hstep);
        double fpp = (frac(delta0 + hstep) - 2.0 * f0 + frac(delta0 - hstep)) / (hstep * hstep);
        res.fraction_mean = f0 + 0.5 * fpp * sigma_w * sigma_w;
        res.fraction_var =
            fp * fp * sigma_w * sigma_w + 0.5 * fpp * fpp * std::pow(sigma_w, 4);
    }
    // counts n = flux * F * dt; excess Fano = Var(n) / <n>
    double mean_counts = photon_flux * res.fraction_mean * bin_width;
    res.excess_fano = mean_counts > 0.0
                          ? photon_flux * bin_width * res.fraction_var / res.fraction_mean
                          : 0.0;
    return res;
}

}  // namespace cavsim
