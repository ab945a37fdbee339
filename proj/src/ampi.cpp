#include "ampi/ampi.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ampi/denoiser.hpp"

namespace ampi {

int map_detect_index(std::complex<double> z, double sigma2, const Constellation& c, double nt) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("map_detect: sigma2 must be > 0");
    if (c.points.empty()) throw std::invalid_argument("map_detect: empty constellation");
    const double v = nt + sigma2;
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const double score =
            (c.probs[i] > 0.0 ? std::log(c.probs[i]) : -1e300) - std::norm(z - c.points[i]) / v;
        if (score > best_score) {  // strict: ties keep the lowest index
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::complex<double> map_detect(std::complex<double> z, double sigma2, const Constellation& c,
                                double nt) {
    return c.points[map_detect_index(z, sigma2, c, nt)];
}

double mmse_estimate(double z, double sigma2, double lambda, double nt) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mmse_estimate: sigma2 must be > 0");
    // z = s + (e + w): a pure-Laplace prior observed through the combined
    // Gaussian noise of variance nt + sigma2.
    return laplace_gauss_F(z, nt + sigma2, lambda, 0.0);
}

MimoResult ampi_map_run(const MatrixXcd& H, const VectorXcd& y, const Constellation& c,
                        double nt_model, double n0, const AmpOptions& opt) {
    const EffectivePrior ep(c, InputNoiseModel{nt_model}, Field::cplx);
    const MixtureDenoiser d(c, nt_model);
    MimoResult res;
    res.decoupled = cbamp_run<std::complex<double>>(H, y, d, ep, n0, opt);
    res.s_hat.resize(res.decoupled.z.size());
    for (Eigen::Index i = 0; i < res.decoupled.z.size(); ++i)
        res.s_hat(i) = map_detect(res.decoupled.z(i), res.decoupled.sigma2_hat, c, nt_model);
    return res;
}

CsResult ampi_mmse_run(const MatrixXd& H, const VectorXd& y, double lambda, double nt_model,
                       double n0, const AmpOptions& opt) {
    const EffectivePrior ep(LaplacePrior{lambda}, InputNoiseModel{nt_model}, Field::real);
    const LaplaceGaussDenoiser d(lambda, nt_model);
    CsResult res;
    res.decoupled = cbamp_run<double>(H, y, d, ep, n0, opt);
    const double s2 = res.decoupled.sigma2_hat;
    res.s_hat.resize(res.decoupled.z.size());
    for (Eigen::Index i = 0; i < res.decoupled.z.size(); ++i)
        res.s_hat(i) = mmse_estimate(res.decoupled.z(i), s2, lambda, nt_model);
    res.x_hat.resize(res.decoupled.z.size());
    for (Eigen::Index i = 0; i < res.decoupled.z.size(); ++i)
        res.x_hat(i) = laplace_gauss_F(res.decoupled.z(i), s2, lambda, nt_model);
    return res;
}

// ---------------------------------------------------------------------------

double sure_objective_sigma(const VectorXd& z, double sigma2, double gamma2, double lambda,
                            double nt) {
    if (!(gamma2 > 0.0)) throw std::invalid_argument("sure_objective: gamma2 must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("sure_objective: lambda must be > 0");
    const Eigen::Index n = z.size();
    double fit = 0.0, g_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const MeanVar<double> mv = laplace_gauss_FG(z(i), gamma2, lambda, nt);
        const double d = mv.mean - z(i);
        fit += d * d;
        g_sum += mv.var;
    }
    const double nn = static_cast<double>(n);
    return fit / nn + sigma2 + (2.0 * sigma2 / gamma2) * (g_sum / nn - gamma2);
}

double sure_objective(const VectorXd& z, const VectorXd& r, double gamma2, double lambda,
                      double nt) {
    return sure_objective_sigma(z, estimate_sigma2_residual<double>(r), gamma2, lambda, nt);
}

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return g;
}

}  // namespace

TunedParams tune_params_sigma(const VectorXd& z, double sigma2, double nt, const TuneGrid& grid) {
    if (z.size() < 1) throw std::invalid_argument("tune_params: empty z");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("tune_params: sigma2 must be > 0");
    const double z2 = z.squaredNorm() / static_cast<double>(z.size());
    const double lam_scale = 1.0 / std::sqrt(std::max(z2, 1e-300));
    const auto lams = log_grid(grid.lambda_lo * lam_scale, grid.lambda_hi * lam_scale,
                               grid.lambda_points);
    const auto gams = log_grid(grid.gamma_lo * sigma2, grid.gamma_hi * sigma2, grid.gamma_points);

    double best = std::numeric_limits<double>::infinity();
    double best_l = lams.front(), best_g = gams.front();
    bool any_finite = false;
    for (double g : gams)
        for (double l : lams) {
            const double v = sure_objective_sigma(z, sigma2, g, l, nt);
            if (std::isfinite(v)) any_finite = true;
            if (v < best) {
                best = v;
                best_l = l;
                best_g = g;
            }
        }
    if (!any_finite) throw std::runtime_error("tune_params: objective is NaN on the whole grid");

    // Local 3x3 refinement with progressively finer multiplicative steps.
    double fl = std::pow(lams.back() / lams.front(), 1.0 / (grid.lambda_points - 1));
    double fg = std::pow(gams.back() / gams.front(), 1.0 / (grid.gamma_points - 1));
    for (int round = 0; round < grid.refine_rounds; ++round) {
        fl = std::pow(fl, 1.0 / 3.0);
        fg = std::pow(fg, 1.0 / 3.0);
        double rl = best_l, rg = best_g;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) {
                if (a == 0 && b == 0) continue;
                const double l = best_l * std::pow(fl, a);
                const double g = best_g * std::pow(fg, b);
                const double v = sure_objective_sigma(z, sigma2, g, l, nt);
                if (v < best) {
                    best = v;
                    rl = l;
                    rg = g;
                }
            }
        best_l = rl;
        best_g = rg;
    }
    return {best_l, best_g};
}

TunedParams tune_params(const VectorXd& z, const VectorXd& r, double nt, const TuneGrid& grid) {
    return tune_params_sigma(z, estimate_sigma2_residual<double>(r), nt, grid);
}

CsResult ampi_sure_run(const MatrixXd& H, const VectorXd& y, double nt_model,
                       const SureOptions& opt) {
    const Eigen::Index n = H.cols();
    const Eigen::Index m = H.rows();
    if (y.size() != m) throw std::invalid_argument("ampi_sure_run: shape mismatch");
    if (opt.t_max < 1) throw std::invalid_argument("ampi_sure_run: t_max must be >= 1");
    const double beta = static_cast<double>(n) / static_cast<double>(m);

    VectorXd x_hat = VectorXd::Zero(n);
    VectorXd r = y;
    VectorXd z(n);
    const double sigma2_init = estimate_sigma2_residual<double>(r);

    CsResult res;
    double lambda_t = 0.0, gamma2_t = 0.0;
    for (int t = 1; t <= opt.t_max; ++t) {
        z = x_hat + H.transpose() * r;
        const double sigma2 = estimate_sigma2_residual<double>(r);
        const TunedParams p = tune_params_sigma(z, sigma2, nt_model, opt.grid);
        lambda_t = p.lambda;
        gamma2_t = p.gamma2;

        VectorXd x_new(n);
        double g_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const MeanVar<double> mv = laplace_gauss_FG(z(i), gamma2_t, lambda_t, nt_model);
            x_new(i) = mv.mean;
            g_sum += mv.var;
        }
        const double g_mean = g_sum / static_cast<double>(n);
        r = y - H * x_new + (beta * g_mean / gamma2_t) * r;

        res.decoupled.trace.push_back({gamma2_t, g_mean, sigma2});
        res.tuned.push_back(p);
        res.decoupled.iterations = t;
        if (!x_new.allFinite() || !r.allFinite() ||
            estimate_sigma2_residual<double>(r) > opt.divergence_factor * sigma2_init)
            throw DivergenceError("ampi_sure_run: iteration diverged", res.decoupled.trace);

        const double dx = (x_new - x_hat).norm();
        const double scale = std::max(x_hat.norm(), 1e-300);
        x_hat = std::move(x_new);
        if (t >= opt.min_iterations && dx <= opt.x_stop_tol * scale) break;
    }

    res.decoupled.z = z;
    res.decoupled.sigma2_hat = gamma2_t;
    res.x_hat = x_hat;
    res.s_hat.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        res.s_hat(i) = mmse_estimate(z(i), gamma2_t, lambda_t, nt_model);
    return res;
}

}  // namespace ampi
