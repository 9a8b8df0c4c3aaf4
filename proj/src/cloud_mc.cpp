#include "cavsim/cloud_mc.hpp"

#include <algorithm>
#include <cmath>

#include "cavsim/rng.hpp"

namespace cavsim {

void CloudSpec::validate() const {
    if (!(atom_count > 0.0)) throw DomainError("atom_count must be positive");
    if (!(drop_height > 0.0)) throw DomainError("drop height must be positive");
    if (!(rms_radius >= 0.0)) throw DomainError("rms radius must be non-negative");
    if (!(temperature >= 0.0)) throw DomainError("temperature must be non-negative");
    if (!(mass > 0.0)) throw DomainError("mass must be positive");
}

namespace {

void require_x_axis(const ModeGeometry& geom) {
    if (std::abs(geom.axis[0] - 1.0) > 1e-9 || std::abs(geom.axis[1]) > 1e-9 ||
        std::abs(geom.axis[2]) > 1e-9)
        throw DomainError("cloud sampling assumes the cavity axis along x");
}

double thermal_sigma_v(const CloudSpec& spec) {
    return std::sqrt(constants::k_boltzmann * spec.temperature / spec.mass);
}

// probability mass of [-a, a] under N(0, s)
double window_mass(double a, double s) {
    if (s <= 0.0) return 1.0;  // delta at 0, inside the window
    return std::erf(a / (s * std::sqrt(2.0)));
}

}  // namespace

void acceptance_window(const CloudSpec& spec, const ModeGeometry& geom, double& half_axial,
                       double& half_transverse) {
    // 4 waists of Gaussian envelope plus horizontal drift accumulated
    // while traversing the vertical extent of the window
    double vz = std::sqrt(2.0 * constants::g_earth * spec.drop_height);
    double vert = 8.0 * geom.waist;
    double drift = 3.0 * thermal_sigma_v(spec) * (vz > 0.0 ? vert / vz : 0.0);
    half_axial = 0.5 * geom.length + 4.0 * geom.waist + drift;
    half_transverse = 4.0 * geom.waist + drift;
}

std::vector<AtomSample> sample_cloud(const CloudSpec& spec, const ModeGeometry& geom,
                                     std::mt19937_64& rng, std::size_t sample_budget) {
    spec.validate();
    geom.validate();
    require_x_axis(geom);
    if (sample_budget < 1) throw DomainError("sample budget must be >= 1");

    double half_ax, half_tr;
    acceptance_window(spec, geom, half_ax, half_tr);

    const double sigma = spec.rms_radius;
    const double sigma_v = thermal_sigma_v(spec);
    const double h = spec.drop_height;
    const double g = constants::g_earth;
    const double base_weight = spec.atom_count / static_cast<double>(sample_budget);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<AtomSample> out;
    out.reserve(sample_budget);
    for (std::size_t n = 0; n < sample_budget; ++n) {
        double z0 = h + sigma * (sigma > 0.0 ? gauss(rng) : 0.0);
        double vz0 = sigma_v > 0.0 ? sigma_v * gauss(rng) : 0.0;

        AtomSample s;
        s.state = InternalState::bright;
        // crossing time of the mode plane
        double disc = vz0 * vz0 + 2.0 * g * z0;
        if (disc < 0.0 || z0 < 0.0) {
            // starts below the mode: never contributes
            s.position = {0.0, 0.0, z0 + geom.origin[2]};
            s.velocity = {0.0, 0.0, vz0};
            s.weight = 0.0;
            out.push_back(s);
            continue;
        }
        double t_c = (vz0 + std::sqrt(disc)) / g;

        double w = base_weight;
        double coords[2];       // x (axial), y (transverse) at t=0
        double vels[2];
        const double halves[2] = {half_ax, half_tr};
        for (int d = 0; d < 2; ++d) {
            double s2 = sigma * sigma + sigma_v * sigma_v * t_c * t_c;
            double sd = std::sqrt(s2);
            if (sd <= 0.0) {
                coords[d] = 0.0;
                vels[d] = 0.0;
                continue;  // point cloud over the mode, mass 1
            }
            double mass = window_mass(halves[d], sd);
            w *= mass;
            double xc = truncated_normal(sd, -halves[d], halves[d], uni(rng));
            double rho = sigma * sigma / s2;
            double tau = std::sqrt(std::max(0.0, sigma * sigma * sigma_v * sigma_v)) *
                         t_c / sd;
            double x0 = rho * xc + (tau > 0.0 ? tau * gauss(rng) : 0.0);
            coords[d] = x0;
            vels[d] = t_c > 0.0 ? (xc - x0) / t_c : 0.0;
        }

        s.position = {geom.origin[0] + coords[0], geom.origin[1] + coords[1],
                      geom.origin[2] + z0};
        s.velocity = {vels[0], vels[1], vz0};
        s.weight = w;
        out.push_back(s);
    }
    return out;
}

std::vector<AtomSample> sample_cloud_direct(const CloudSpec& spec, const ModeGeometry& geom,
                                            std::mt19937_64& rng, std::size_t sample_budget) {
    spec.validate();
    geom.validate();
    if (sample_budget < 1) throw DomainError("sample budget must be >= 1");

    const double sigma = spec.rms_radius;
    const double sigma_v = thermal_sigma_v(spec);
    const double base_weight = spec.atom_count / static_cast<double>(sample_budget);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<AtomSample> out;
    out.reserve(sample_budget);
    for (std::size_t n = 0; n < sample_budget; ++n) {
        AtomSample s;
        s.state = InternalState::bright;
        for (int d = 0; d < 3; ++d) {
            s.position[d] = geom.origin[d] + (sigma > 0.0 ? sigma * gauss(rng) : 0.0);
            s.velocity[d] = sigma_v > 0.0 ? sigma_v * gauss(rng) : 0.0;
        }
        s.position[2] += spec.drop_height;
        s.weight = base_weight;
        out.push_back(s);
    }
    return out;
}

AtomSample propagate(const AtomSample& s, double t, double gravity) {
    if (t < 0.0) throw DomainError("propagation time must be non-negative");
    AtomSample r = s;
    r.position[0] = s.position[0] + s.velocity[0] * t;
    r.position[1] = s.position[1] + s.velocity[1] * t;
    r.position[2] = s.position[2] + s.velocity[2] * t - 0.5 * gravity * t * t;
    r.velocity[2] = s.velocity[2] - gravity * t;
    return r;
}

std::vector<AtomSample> propagate(const std::vector<AtomSample>& samples, double t,
                                  double gravity) {
    std::vector<AtomSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(propagate(s, t, gravity));
    return out;
}

TransitTrace transit_trace(const std::vector<AtomSample>& samples, const ModeGeometry& geom,
                           const CouplingRates& rates, double zeeman_factor,
                           const std::vector<double>& times, double gravity) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw DomainError("time grid must be strictly increasing");

    TransitTrace trace;
    trace.times = times;
    trace.c_tot.resize(times.size());
    trace.n_eff.resize(times.size());
    trace.bright_weight.resize(times.size());
    const double coupling = zeeman_factor * rates.cooperativity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        double sum = 0.0, bright = 0.0;
        for (const auto& s : samples) {
            if (s.state != InternalState::bright || s.weight == 0.0) continue;
            bright += s.weight;
            AtomSample p = propagate(s, times[i], gravity);
            sum += s.weight * mode_intensity(geom, p.position);
        }
        trace.n_eff[i] = sum;
        trace.c_tot[i] = coupling * sum;
        trace.bright_weight[i] = bright;
    }
    return trace;
}

PulseResult simulate_pulse(const std::vector<AtomSample>& initial, const ModeGeometry& geom,
                           const CouplingRates& rates, double zeeman_factor,
                           const ExcitationConfig& exc, const std::vector<double>& times,
                           double atom_mass, double wavelength, std::mt19937_64& rng,
                           double gravity) {
    if (times.empty()) throw DomainError("empty time grid");
    if (exc.turn_on < times.front()) throw DomainError("excitation turn-on before simulation start");
    if (exc.pump_photon_budget < 1.0) throw DomainError("pump photon budget must be >= 1");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw DomainError("time grid must be strictly increasing");

    const double coupling = zeeman_factor * rates.cooperativity();
    const double recoil = 2.0 * constants::pi * constants::hbar /
                          (wavelength * atom_mass);  // hbar k / m
    const double p_dark = 1.0 / exc.pump_photon_budget;

    PulseResult res;
    res.trace.times = times;
    res.trace.c_tot.assign(times.size(), 0.0);
    res.trace.n_eff.assign(times.size(), 0.0);
    res.trace.bright_weight.assign(times.size(), 0.0);
    res.emission_weight.assign(times.size(), 0.0);

    // evolve mutable copies step by step; before turn-on this matches
    // the closed-form ballistic flight
    std::vector<AtomSample> atoms = propagate(initial, times.front(), gravity);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double t_prev = times.front();
    for (std::size_t i = 0; i < times.size(); ++i) {
        double dt = times[i] - t_prev;
        for (auto& a : atoms) {
            if (dt > 0.0) {
                AtomSample moved = propagate(a, dt, gravity);
                a.position = moved.position;
                a.velocity = moved.velocity;
            }
            if (a.state != InternalState::bright || a.weight == 0.0) continue;
            if (times[i] <= exc.turn_on) continue;
            // scatters within the part of this step after turn-on
            double dt_exc = times[i] - std::max(t_prev, exc.turn_on);
            double mean_sc = exc.scatter_rate * (i == 0 ? 0.0 : dt_exc);
            if (mean_sc <= 0.0) continue;
            std::poisson_distribution<int> pois(mean_sc);
            int n_sc = pois(rng);
            for (int k = 0; k < n_sc; ++k) {
                double inten = mode_intensity(geom, a.position);
                double c_loc = coupling * inten;
                double branch =
                    exc.cavity_detuned ? 0.0 : 2.0 * c_loc / (1.0 + 2.0 * c_loc);
                if (uni(rng) < branch) res.emission_weight[i] += a.weight;
                for (int d = 0; d < 3; ++d) a.velocity[d] += recoil * exc.beam_dir[d];
                if (uni(rng) < p_dark) {
                    a.state = InternalState::dark;
                    break;
                }
            }
        }
        double sum = 0.0, bright = 0.0;
        for (const auto& a : atoms) {
            if (a.state != InternalState::bright || a.weight == 0.0) continue;
            bright += a.weight;
            sum += a.weight * mode_intensity(geom, a.position);
        }
        res.trace.n_eff[i] = sum;
        res.trace.c_tot[i] = coupling * sum;
        res.trace.bright_weight[i] = bright;
        t_prev = times[i];
    }
    res.final_samples = std::move(atoms);
    return res;
}

CalibrationResult calibrate_cloud(const CloudSpec& spec, const ModeGeometry& geom,
                                  const CouplingRates& rates, double zeeman_factor,
                                  std::uint64_t seed, std::size_t sample_budget, int drops,
                                  double target_peak_n_eff, double gravity) {
    if (drops < 1) throw DomainError("need at least one drop");
    if (!(target_peak_n_eff > 0.0)) throw DomainError("target peak must be positive");

    double t_arr = std::sqrt(2.0 * spec.drop_height / gravity);
    std::vector<double> times;
    for (double t = t_arr - 5e-3; t <= t_arr + 5e-3; t += 2.5e-4) times.push_back(t);

    std::vector<double> mean(times.size(), 0.0);
    for (int d = 0; d < drops; ++d) {
        auto rng = substream(seed, static_cast<std::uint64_t>(d));
        auto samples = sample_cloud(spec, geom, rng, sample_budget);
        auto tr = transit_trace(samples, geom, rates, zeeman_factor, times, gravity);
        for (std::size_t i = 0; i < times.size(); ++i) mean[i] += tr.n_eff[i] / drops;
    }
    // boxcar smoothing before the max: the underlying trace varies over
    // milliseconds while per-bin estimator noise is uncorrelated, so the
    // raw maximum is biased high
    std::vector<double> smooth(times.size(), 0.0);
    const int half = 4;
    for (std::size_t i = 0; i < times.size(); ++i) {
        int lo = std::max<int>(0, static_cast<int>(i) - half);
        int hi = std::min<int>(times.size() - 1, static_cast<int>(i) + half);
        for (int j = lo; j <= hi; ++j) smooth[i] += mean[j];
        smooth[i] /= (hi - lo + 1);
    }
    std::size_t imax = std::max_element(smooth.begin(), smooth.end()) - smooth.begin();
    double peak = smooth[imax];
    if (!(peak > 0.0)) throw DomainError("calibration found zero coupling; check geometry");

    CalibrationResult res;
    res.factor = target_peak_n_eff / peak;
    res.peak_n_eff = peak;
    res.peak_time = times[imax];
    res.calibrated = spec;
    res.calibrated.atom_count = spec.atom_count * res.factor;
    return res;
}

}  // namespace cavsim
