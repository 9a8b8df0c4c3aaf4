#include "cavsim/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "cavsim/constants.hpp"
#include "cavsim/rng.hpp"

namespace cavsim {

void CountRateTriple::validate() const {
    if (!(i_min > 0.0) || !(i_max > 0.0) || !(i_atoms > 0.0))
        throw DomainError("count rates must be positive");
    if (i_min > i_max) throw DomainError("I_min exceeds I_max");
    if (i_atoms > i_max) throw DomainError("I_atoms exceeds I_max");
}

double visibility(double i_min, double i_max) {
    if (!(i_min > 0.0) || !(i_max > 0.0) || i_min > i_max)
        throw DomainError("visibility requires 0 < I_min <= I_max");
    return 1.0 - std::sqrt(i_min / i_max);
}

double reflected_fraction_resonant(double v, double c_tot) {
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("visibility must be in (0,1]");
    if (!(c_tot >= 0.0)) throw DomainError("C_tot must be non-negative");
    double p_tot = 2.0 * c_tot + 1.0;
    double r = -1.0 + v / p_tot;
    return r * r;
}

double reflected_fraction_detuned(double v, double c_tot, double delta) {
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("visibility must be in (0,1]");
    if (!(c_tot >= 0.0)) throw DomainError("C_tot must be non-negative");
    if (!std::isfinite(delta)) throw DomainError("detuning must be finite");
    double p_tot = 2.0 * c_tot + 1.0;
    std::complex<double> denom(1.0 + delta * delta / p_tot, 2.0 * delta * c_tot / p_tot);
    std::complex<double> r = -1.0 + (v / p_tot) * (1.0 + delta * delta) / denom;
    return std::norm(r);
}

bool detuning_in_validity_range(double delta, double g, double gamma) {
    return std::abs(delta) <= 0.3 * g / gamma;
}

InversionResult invert_to_cooperativity(const CountRateTriple& counts, double single_atom_c,
                                        double zeeman_factor) {
    counts.validate();
    if (counts.i_atoms < counts.i_min)
        throw DomainError("negative cooperativity: I_atoms below empty-cavity level");
    double v = visibility(counts.i_min, counts.i_max);
    double s = std::sqrt(counts.i_atoms / counts.i_max);
    // physical branch: sqrt(I_atoms/I_max) = 1 - v/P_tot
    if (s >= 1.0) throw DomainError("I_atoms at I_max: cooperativity diverges");
    double p_tot = v / (1.0 - s);
    double c_tot = 0.5 * (p_tot - 1.0);
    if (c_tot < 0.0) c_tot = 0.0;  // rounding at I_atoms == I_min
    double n_eff = c_tot / (zeeman_factor * single_atom_c);
    return {v, c_tot, n_eff};
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw DomainError("gauss_hermite order must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double eps = 1e-14;
    const double pim4 = 0.7511255444649425;  // pi^(-1/4)
    int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * nodes[1];
        else
            z = 2.0 * z - nodes[i - 2];
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

namespace {

// pmf of the intensity seen by one atom: uniform axial phase, uniform
// transverse offset within the reference box. Midpoint tensor grid,
// exploiting the quadrant symmetry.
void build_atom_intensity_pdf(double box_halfwidth_waists, int bins, std::vector<double>& pmf,
                              double& mean) {
    pmf.assign(bins, 0.0);
    const int n_phase = 192, n_trans = 96;
    const double a = box_halfwidth_waists;
    double total = 0.0;
    for (int it = 0; it < n_trans; ++it) {
        double xi = a * (it + 0.5) / n_trans;
        double gx = std::exp(-2.0 * xi * xi);
        for (int jt = 0; jt < n_trans; ++jt) {
            double eta = a * (jt + 0.5) / n_trans;
            double gt = gx * std::exp(-2.0 * eta * eta);
            for (int p = 0; p < n_phase; ++p) {
                double phi = 0.5 * constants::pi * (p + 0.5) / n_phase;
                double cp = std::cos(phi);
                double inten = cp * cp * gt;
                int b = std::min(bins - 1, static_cast<int>(inten * bins));
                pmf[b] += 1.0;
                total += 1.0;
            }
        }
    }
    mean = 0.0;
    for (int b = 0; b < bins; ++b) {
        pmf[b] /= total;
        mean += pmf[b] * (b + 0.5) / bins;
    }
}

double poisson_quantile(double lambda, double u) {
    double p = std::exp(-lambda);
    double cdf = p;
    int k = 0;
    while (u > cdf && k < 100000) {
        ++k;
        p *= lambda / k;
        cdf += p;
    }
    return k;
}

}  // namespace

LineshapeAverager::LineshapeAverager(double v, const FluctuationModel& model,
                                     double laser_fwhm_delta, std::vector<double> delta_grid,
                                     const LineshapeConfig& cfg)
    : v_(v), model_(model), laser_fwhm_(laser_fwhm_delta), delta_grid_(std::move(delta_grid)),
      cfg_(cfg) {
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("visibility must be in (0,1]");
    if (laser_fwhm_ < 0.0) throw DomainError("laser linewidth must be non-negative");
    if (model_.mean_n_eff < 0.0) throw DomainError("mean N_eff must be non-negative");
    if (model_.box_halfwidth_waists <= 0.0)
        throw DomainError("fluctuation box halfwidth must be positive");

    const int bins = cfg_.intensity_bins;
    build_atom_intensity_pdf(model_.box_halfwidth_waists, bins, atom_pdf_, mean_intensity_);

    double lam0 = model_.mean_n_eff / mean_intensity_;
    if (cfg_.max_atoms > 0) {
        max_atoms_ = cfg_.max_atoms;
    } else {
        double lam_cap = 3.0 * lam0 + 10.0;
        max_atoms_ = std::min(200, static_cast<int>(lam_cap + 8.0 * std::sqrt(lam_cap) + 10.0));
    }

    if (cfg_.method != AveragingMethod::quadrature) return;

    // Detuning nodes: the requested grid shifted to the laser-lineshape
    // quadrature points.
    std::vector<double> gh_x{0.0}, gh_w{1.0};
    int order = 1;
    double sigma = 0.0;
    if (laser_fwhm_ > 0.0) {
        order = cfg_.hermite_order;
        gauss_hermite(order, gh_x, gh_w);
        double wsum = 0.0;
        for (double w : gh_w) wsum += w;
        for (double& w : gh_w) w /= wsum;
        sigma = laser_fwhm_ / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    }
    const std::size_t n_nodes = delta_grid_.size() * order;
    std::vector<double> nodes(n_nodes);
    for (std::size_t j = 0; j < delta_grid_.size(); ++j)
        for (int k = 0; k < order; ++k)
            nodes[j * order + k] = delta_grid_[j] + std::sqrt(2.0) * sigma * gh_x[k];

    // N-fold convolution powers of the intensity pmf, then the
    // conditional means E[f | N atoms] at every node.
    const double scale = model_.zeeman_factor * model_.single_atom_c;
    const double du = 1.0 / bins;
    std::vector<std::vector<double>> powers(max_atoms_ + 1);
    powers[0] = {1.0};
    for (int n = 1; n <= max_atoms_; ++n) {
        const auto& prev = powers[n - 1];
        auto& cur = powers[n];
        cur.assign(prev.size() + bins - 1, 0.0);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            if (prev[i] == 0.0) continue;
            double pi_ = prev[i];
            for (int b = 0; b < bins; ++b) cur[i + b] += pi_ * atom_pdf_[b];
        }
    }

    std::size_t max_support = powers[max_atoms_].size();
    std::vector<double> fvals(max_support);
    cond_mean_.assign(static_cast<std::size_t>(max_atoms_ + 1) * n_nodes, 0.0);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        double delta = nodes[k];
        for (std::size_t i = 0; i < max_support; ++i)
            fvals[i] = reflected_fraction_detuned(v_, scale * (i + 0.5) * du, delta);
        double f0 = reflected_fraction_detuned(v_, 0.0, delta);
        // weight node contributions by the laser lineshape now; curve()
        // then only mixes over the Poisson atom number
        double wk = (order == 1) ? 1.0 : gh_w[k % order];
        for (int n = 0; n <= max_atoms_; ++n) {
            double acc;
            if (n == 0) {
                acc = f0;
            } else {
                acc = 0.0;
                const auto& p = powers[n];
                for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * fvals[i];
            }
            cond_mean_[static_cast<std::size_t>(n) * delta_grid_.size() + k / order] +=
                wk * acc;
        }
    }
}

std::vector<double> LineshapeAverager::curve(double mean_n_eff) const {
    if (mean_n_eff < 0.0) throw DomainError("mean N_eff must be non-negative");
    if (cfg_.method == AveragingMethod::monte_carlo) return curve_monte_carlo(mean_n_eff);
    return curve_quadrature(mean_n_eff);
}

std::vector<double> LineshapeAverager::curve_quadrature(double mean_n_eff) const {
    double lambda = mean_n_eff / mean_intensity_;
    // truncated, renormalized Poisson weights
    std::vector<double> pois(max_atoms_ + 1);
    double logp = -lambda;
    double norm = 0.0;
    for (int n = 0; n <= max_atoms_; ++n) {
        pois[n] = std::exp(logp);
        norm += pois[n];
        logp += std::log(lambda > 0.0 ? lambda : 1e-300) - std::log(n + 1.0);
    }
    for (auto& p : pois) p /= norm;

    std::vector<double> out(delta_grid_.size(), 0.0);
    for (int n = 0; n <= max_atoms_; ++n) {
        if (pois[n] < 1e-16) continue;
        const double* row = &cond_mean_[static_cast<std::size_t>(n) * delta_grid_.size()];
        for (std::size_t j = 0; j < delta_grid_.size(); ++j) out[j] += pois[n] * row[j];
    }
    return out;
}

std::vector<double> LineshapeAverager::curve_monte_carlo(double mean_n_eff) const {
    double lambda = mean_n_eff / mean_intensity_;
    const double scale = model_.zeeman_factor * model_.single_atom_c;
    const double a = model_.box_halfwidth_waists;

    // per-replica C_tot draws; common random numbers across lambda values
    std::vector<double> c_tots(cfg_.mc_replicas);
    for (int r = 0; r < cfg_.mc_replicas; ++r) {
        auto eng = substream(cfg_.seed, 0x4c696e65 + static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int m = static_cast<int>(poisson_quantile(lambda, uni(eng)));
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            double phi = constants::pi * uni(eng);
            double xi = a * (2.0 * uni(eng) - 1.0);
            double eta = a * (2.0 * uni(eng) - 1.0);
            double cp = std::cos(phi);
            s += cp * cp * std::exp(-2.0 * (xi * xi + eta * eta));
        }
        c_tots[r] = scale * s;
    }

    std::vector<double> gh_x{0.0}, gh_w{1.0};
    int order = 1;
    double sigma = 0.0;
    if (laser_fwhm_ > 0.0) {
        order = cfg_.hermite_order;
        gauss_hermite(order, gh_x, gh_w);
        double wsum = 0.0;
        for (double w : gh_w) wsum += w;
        for (double& w : gh_w) w /= wsum;
        sigma = laser_fwhm_ / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    }

    std::vector<double> out(delta_grid_.size(), 0.0);
    for (std::size_t j = 0; j < delta_grid_.size(); ++j) {
        double acc = 0.0;
        for (int k = 0; k < order; ++k) {
            double delta = delta_grid_[j] + std::sqrt(2.0) * sigma * gh_x[k];
            double m = 0.0;
            for (double ct : c_tots) m += reflected_fraction_detuned(v_, ct, delta);
            acc += gh_w[k] * m / c_tots.size();
        }
        out[j] = acc;
    }
    return out;
}

std::vector<double> averaged_lineshape(double v, const FluctuationModel& model,
                                       double laser_fwhm_delta,
                                       const std::vector<double>& delta_grid,
                                       const LineshapeConfig& cfg) {
    LineshapeAverager avg(v, model, laser_fwhm_delta, delta_grid, cfg);
    return avg.curve();
}

}  // namespace cavsim
