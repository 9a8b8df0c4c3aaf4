#include "cavsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "cavsim/errors.hpp"

namespace cavsim {

void ScanDataset::validate() const {
    if (delta.size() < 5) throw DomainError("scan needs at least 5 points");
    if (fraction.size() != delta.size() || sigma.size() != delta.size())
        throw DomainError("scan column lengths differ");
    bool has_neg = false, has_pos = false;
    for (double d : delta) {
        if (d < 0.0) has_neg = true;
        if (d > 0.0) has_pos = true;
    }
    if (!has_neg || !has_pos) throw DomainError("scan must span both signs of detuning");
    for (double s : sigma)
        if (!(s > 0.0)) throw DomainError("uncertainties must be positive");
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("visibility must be in (0,1]");
    if (!(single_atom_c > 0.0)) throw DomainError("single-atom C must be positive");
    if (!(zeeman_factor > 0.0 && zeeman_factor <= 1.0))
        throw DomainError("zeeman factor must be in (0,1]");
}

namespace {

// model evaluator; keeps one LineshapeAverager alive while only the
// atom number floats, rebuilds when nuisance parameters move
class ModelEval {
public:
    ModelEval(const ScanDataset& data, const FitConfig& cfg) : data_(data), cfg_(cfg) {}

    std::vector<double> operator()(double n_eff, double v, double fwhm) {
        if (!avg_ || v != cached_v_ || fwhm != cached_fwhm_) {
            FluctuationModel model{std::max(n_eff, 0.0), data_.single_atom_c,
                                   data_.zeeman_factor, cfg_.box_halfwidth_waists};
            avg_ = std::make_unique<LineshapeAverager>(v, model, fwhm, data_.delta,
                                                       cfg_.lineshape);
            cached_v_ = v;
            cached_fwhm_ = fwhm;
        }
        return avg_->curve(std::max(n_eff, 0.0));
    }

private:
    const ScanDataset& data_;
    const FitConfig& cfg_;
    std::unique_ptr<LineshapeAverager> avg_;
    double cached_v_ = -1.0, cached_fwhm_ = -1.0;
};

double chi_square(const ScanDataset& data, const std::vector<double>& model) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < data.delta.size(); ++i) {
        double r = (data.fraction[i] - model[i]) / data.sigma[i];
        chi2 += r * r;
    }
    return chi2;
}

// solve (A + damp*diag(A)) x = b for small symmetric positive A, in place
bool solve_damped(std::vector<double> a, std::vector<double> b, double damp, int p,
                  std::vector<double>& x) {
    for (int i = 0; i < p; ++i) a[i * p + i] *= (1.0 + damp);
    // Cholesky
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * p + j];
            for (int k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
            if (i == j) {
                if (s <= 0.0) return false;
                a[i * p + i] = std::sqrt(s);
            } else {
                a[i * p + j] = s / a[j * p + j];
            }
        }
    }
    // forward/backward substitution
    for (int i = 0; i < p; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= a[i * p + k] * b[k];
        b[i] = s / a[i * p + i];
    }
    x.assign(p, 0.0);
    for (int i = p - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < p; ++k) s -= a[k * p + i] * x[k];
        x[i] = s / a[i * p + i];
    }
    return true;
}

double warm_start_n_eff(const ScanDataset& data) {
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < data.delta.size(); ++i)
        if (std::abs(data.delta[i]) < std::abs(data.delta[i0])) i0 = i;
    double y = std::clamp(data.fraction[i0], 1e-6, 1.0 - 1e-9);
    double s = std::sqrt(y);
    double p_tot = data.v / (1.0 - s);
    double c_tot = 0.5 * (p_tot - 1.0);
    double n = c_tot / (data.zeeman_factor * data.single_atom_c);
    if (!std::isfinite(n) || n < 0.01) n = 0.01;
    return n;
}

}  // namespace

FitResult fit_scan(const ScanDataset& data, const FitConfig& cfg) {
    data.validate();

    int p = 1 + (cfg.float_visibility ? 1 : 0) + (cfg.float_linewidth ? 1 : 0);
    std::vector<double> theta(p);
    theta[0] = cfg.initial_n_eff > 0.0 ? cfg.initial_n_eff : warm_start_n_eff(data);
    int iv = -1, iw = -1, idx = 1;
    if (cfg.float_visibility) iv = idx++;
    if (cfg.float_linewidth) iw = idx++;
    if (iv >= 0) theta[iv] = data.v;
    if (iw >= 0) theta[iw] = std::max(cfg.laser_fwhm, 1e-3);

    ModelEval eval(data, cfg);
    auto model_at = [&](const std::vector<double>& th) {
        double v = iv >= 0 ? th[iv] : data.v;
        double fwhm = iw >= 0 ? th[iw] : cfg.laser_fwhm;
        return eval(th[0], v, fwhm);
    };

    const std::size_t n_pts = data.delta.size();
    double chi2 = chi_square(data, model_at(theta));
    double damp = 1e-3;
    int iter = 0;
    bool converged = false;
    std::ostringstream trace;

    std::vector<double> jac(n_pts * p);
    for (; iter < cfg.max_iterations; ++iter) {
        auto m0 = model_at(theta);
        // central-difference Jacobian of the weighted residuals
        for (int j = 0; j < p; ++j) {
            double h = std::max(1e-5, 1e-4 * std::abs(theta[j]));
            auto tp = theta, tm = theta;
            tp[j] += h;
            tm[j] = std::max(0.0, tm[j] - h);
            double span = tp[j] - tm[j];
            auto mp = model_at(tp);
            auto mm = model_at(tm);
            for (std::size_t i = 0; i < n_pts; ++i)
                jac[i * p + j] = -(mp[i] - mm[i]) / (span * data.sigma[i]);
        }
        std::vector<double> jtj(p * p, 0.0), jtr(p, 0.0);
        for (std::size_t i = 0; i < n_pts; ++i) {
            double r = (data.fraction[i] - m0[i]) / data.sigma[i];
            for (int j = 0; j < p; ++j) {
                jtr[j] -= jac[i * p + j] * r;
                for (int k = 0; k <= j; ++k) jtj[j * p + k] += jac[i * p + j] * jac[i * p + k];
            }
        }
        for (int j = 0; j < p; ++j)
            for (int k = j + 1; k < p; ++k) jtj[j * p + k] = jtj[k * p + j];
        for (int j = 0; j < p; ++j)
            if (!(jtj[j * p + j] > 0.0))
                throw ConvergenceError("rank-deficient Jacobian in parameter " +
                                       std::to_string(j));

        bool stepped = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            std::vector<double> step;
            if (!solve_damped(jtj, jtr, damp, p, step)) {
                damp *= 10.0;
                continue;
            }
            auto cand = theta;
            for (int j = 0; j < p; ++j) cand[j] += step[j];
            cand[0] = std::max(0.0, cand[0]);
            if (iv >= 0) cand[iv] = std::clamp(cand[iv], 1e-4, 1.0);
            if (iw >= 0) cand[iw] = std::max(0.0, cand[iw]);
            double chi2_new = chi_square(data, model_at(cand));
            if (chi2_new <= chi2 + 1e-14) {
                double rel_step = 0.0;
                for (int j = 0; j < p; ++j)
                    rel_step = std::max(rel_step,
                                        std::abs(cand[j] - theta[j]) / (std::abs(theta[j]) + 1e-12));
                theta = cand;
                chi2 = chi2_new;
                damp = std::max(damp * 0.3, 1e-12);
                stepped = true;
                if (rel_step < cfg.step_tol) converged = true;
                break;
            }
            damp *= 10.0;
        }
        trace << "iter " << iter << " chi2 " << chi2 << " n_eff " << theta[0] << "\n";
        if (converged) break;
        if (!stepped) {
            // no downhill step found at any damping: at a minimum
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("fit did not converge in " +
                               std::to_string(cfg.max_iterations) + " iterations\n" +
                               trace.str());

    // covariance from the undamped normal equations at the optimum
    auto m0 = model_at(theta);
    for (int j = 0; j < p; ++j) {
        double h = std::max(1e-5, 1e-4 * std::abs(theta[j]));
        auto tp = theta, tm = theta;
        tp[j] += h;
        tm[j] = std::max(0.0, tm[j] - h);
        double span = tp[j] - tm[j];
        auto mp = model_at(tp);
        auto mm = model_at(tm);
        for (std::size_t i = 0; i < n_pts; ++i)
            jac[i * p + j] = (mp[i] - mm[i]) / (span * data.sigma[i]);
    }
    std::vector<double> jtj(p * p, 0.0);
    for (std::size_t i = 0; i < n_pts; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < p; ++k) jtj[j * p + k] += jac[i * p + j] * jac[i * p + k];
    // invert via Cholesky solves against unit vectors
    std::vector<double> cov_col, unit(p, 0.0);
    double var_n = 0.0;
    unit[0] = 1.0;
    if (!solve_damped(jtj, unit, 0.0, p, cov_col))
        throw ConvergenceError("singular normal equations at optimum");
    var_n = cov_col[0];

    FitResult res;
    res.n_eff = theta[0];
    res.n_eff_se = std::sqrt(std::max(0.0, var_n));
    res.visibility = iv >= 0 ? theta[iv] : data.v;
    res.linewidth = iw >= 0 ? theta[iw] : cfg.laser_fwhm;
    res.chi2 = chi2;
    res.dof = static_cast<int>(n_pts) - p;
    res.iterations = iter + 1;
    res.converged = true;
    return res;
}

ProfileInterval profile_uncertainty(const FitResult& result, const ScanDataset& data,
                                    const FitConfig& cfg) {
    if (!result.converged) throw DomainError("profile requires a converged fit");
    data.validate();

    ModelEval eval(data, cfg);
    auto chi2_at = [&](double n) {
        return chi_square(data, eval(n, result.visibility, result.linewidth));
    };
    double chi2_min = chi2_at(result.n_eff);
    double target = chi2_min + 1.0;

    auto cross = [&](double inner, double outer, int steps) {
        // bisection for chi2(n) == target between inner (below) and outer
        for (int i = 0; i < steps; ++i) {
            double mid = 0.5 * (inner + outer);
            (chi2_at(mid) < target ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };

    ProfileInterval out;
    double scale = std::max(result.n_eff_se, 1e-3);

    // upper bound
    double hi = result.n_eff + scale;
    int guard = 0;
    while (chi2_at(hi) < target && guard++ < 60) hi = result.n_eff + (hi - result.n_eff) * 2.0;
    if (guard > 60) {
        out.open_upper = true;
        out.upper = hi;
    } else {
        out.upper = cross(result.n_eff, hi, 60);
    }

    // lower bound, clipped at zero
    if (result.n_eff <= 0.0) {
        out.lower = 0.0;
        out.clipped_at_zero = true;
    } else if (chi2_at(0.0) < target) {
        out.lower = 0.0;
        out.clipped_at_zero = true;
    } else {
        double lo = std::max(0.0, result.n_eff - scale);
        guard = 0;
        while (chi2_at(lo) < target && lo > 0.0 && guard++ < 60)
            lo = std::max(0.0, result.n_eff - (result.n_eff - lo) * 2.0);
        out.lower = cross(result.n_eff, lo, 60);
    }
    return out;
}

}  // namespace cavsim
