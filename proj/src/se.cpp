#include "ampi/se.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ampi/quadrature.hpp"

namespace ampi {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr int kRealNodes = 160;  // per-component Gauss-Hermite, real track
constexpr int kCplxNodes = 48;   // per dimension, complex track

// Gaussian location/scale mixtures admit exact per-component Gauss-Hermite
// nodes for the z-marginal; the Laplace marginal uses adaptive
// Gauss-Kronrod against its closed-form density instead.
bool is_gaussian_mixture(const EffectivePrior& ep) {
    return !std::holds_alternative<LaplacePrior>(ep.prior());
}

struct Nodes {
    std::vector<double> z;
    std::vector<double> w;  // sums to 1
};

Nodes mixture_marginal_nodes(const EffectivePrior& ep, double sigma2, int n_nodes) {
    const auto& gh = gauss_hermite(n_nodes);
    Nodes out;
    auto add_component = [&](double prob, double mean, double var) {
        if (prob <= 0.0) return;
        const double s = std::sqrt(2.0 * var);
        for (int j = 0; j < n_nodes; ++j) {
            out.z.push_back(mean + s * gh.nodes[j]);
            out.w.push_back(prob * gh.weights[j] / kSqrtPi);
        }
    };
    if (const auto* c = std::get_if<Constellation>(&ep.prior())) {
        for (std::size_t i = 0; i < c->points.size(); ++i)
            add_component(c->probs[i], c->points[i].real(), ep.nt() + sigma2);
    } else {
        const double k = std::get<BernoulliGaussianPrior>(ep.prior()).kappa;
        add_component(1.0 - k, 0.0, ep.nt() + sigma2);
        add_component(k, 0.0, 1.0 + ep.nt() + sigma2);
    }
    return out;
}

// E_z[f(z)] with z = x + w, Var w = sigma2, x ~ ep (real track).
double expect_real(const EffectivePrior& ep, double sigma2,
                   const std::function<double(double)>& f) {
    if (is_gaussian_mixture(ep)) {
        const Nodes nodes = mixture_marginal_nodes(ep, sigma2, kRealNodes);
        double acc = 0.0;
        for (std::size_t k = 0; k < nodes.z.size(); ++k) acc += nodes.w[k] * f(nodes.z[k]);
        return acc;
    }
    const EffectivePrior marg = ep.with_extra_noise(sigma2);
    const double L = support_radius(marg);
    return integrate([&](double z) { return marg.density(z) * f(z); }, -L, L, 1e-10, 18);
}

// E_z[f(z)] on the complex track (constellation + circular Gaussian).
double expect_cplx(const EffectivePrior& ep, double sigma2,
                   const std::function<double(std::complex<double>)>& f) {
    const auto& c = std::get<Constellation>(ep.prior());
    const auto& gh = gauss_hermite(kCplxNodes);
    const double s = std::sqrt(ep.nt() + sigma2);  // per-atom CN(a, nt + sigma2)
    double acc = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (c.probs[i] <= 0.0) continue;
        double atom = 0.0;
        for (int j = 0; j < kCplxNodes; ++j)
            for (int l = 0; l < kCplxNodes; ++l) {
                const std::complex<double> z =
                    c.points[i] + s * std::complex<double>(gh.nodes[j], gh.nodes[l]);
                atom += gh.weights[j] * gh.weights[l] * f(z);
            }
        acc += c.probs[i] * atom / (kSqrtPi * kSqrtPi);
    }
    return acc;
}

}  // namespace

double psi(const EffectivePrior& ep, const DenoiserR& d, double sigma2, double gamma2) {
    if (ep.field() != Field::real) throw std::invalid_argument("psi: field mismatch");
    if (!(sigma2 > 0.0) || !(gamma2 > 0.0))
        throw std::invalid_argument("psi: variances must be > 0");
    const auto dstar = matched_denoiser_real(ep);
    return expect_real(ep, sigma2, [&](double z) {
        const MeanVar<double> star = dstar->eval(z, sigma2);
        const double df = d.F(z, gamma2) - star.mean;
        return df * df + star.var;
    });
}

double psi(const EffectivePrior& ep, const DenoiserC& d, double sigma2, double gamma2) {
    if (ep.field() != Field::cplx) throw std::invalid_argument("psi: field mismatch");
    if (!(sigma2 > 0.0) || !(gamma2 > 0.0))
        throw std::invalid_argument("psi: variances must be > 0");
    const auto dstar = matched_denoiser_complex(ep);
    return expect_cplx(ep, sigma2, [&](std::complex<double> z) {
        const MeanVar<std::complex<double>> star = dstar->eval(z, sigma2);
        return std::norm(d.F(z, gamma2) - star.mean) + star.var;
    });
}

double psi_matched(const EffectivePrior& ep, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("psi_matched: sigma2 must be > 0");
    if (ep.field() == Field::real) {
        const auto dstar = matched_denoiser_real(ep);
        return expect_real(ep, sigma2, [&](double z) { return dstar->G(z, sigma2); });
    }
    const auto dstar = matched_denoiser_complex(ep);
    return expect_cplx(ep, sigma2, [&](std::complex<double> z) { return dstar->G(z, sigma2); });
}

SeTrace se_recursion(double beta, double n0, const EffectivePrior& ep, const SeOptions& opt) {
    if (opt.t_max < 1) throw std::invalid_argument("se_recursion: t_max must be >= 1");
    SeTrace tr;
    double s2 = n0 + beta * ep.variance();
    tr.sigma2.push_back(s2);
    for (int t = 1; t < opt.t_max; ++t) {
        const double next = beta > 0.0 ? n0 + beta * psi_matched(ep, s2) : n0;
        tr.sigma2.push_back(next);
        if (std::fabs(next - s2) <= opt.tol * s2) {
            tr.converged = true;
            s2 = next;
            break;
        }
        s2 = next;
    }
    tr.fixed_point = s2;
    return tr;
}

std::vector<double> fixed_points(double beta, double n0, const EffectivePrior& ep) {
    const double var = ep.variance();
    const double lo = 1e-8 * var;
    const double hi = 2.0 * (n0 + beta * var);
    const int n = 400;
    auto phi = [&](double s2) { return n0 + beta * psi_matched(ep, s2) - s2; };
    std::vector<double> grid(n), val(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
        val[i] = phi(grid[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < n; ++i) {
        if (val[i] == 0.0) {
            roots.push_back(grid[i]);
            continue;
        }
        if (val[i] * val[i + 1] < 0.0) {
            double a = grid[i], b = grid[i + 1], fa = val[i];
            for (int it = 0; it < 80; ++it) {
                const double m = std::sqrt(a * b);  // bisect in log space
                const double fm = phi(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
                if ((b - a) <= 1e-10 * a) break;
            }
            roots.push_back(0.5 * (a + b));
        }
    }
    if (val[n - 1] == 0.0) roots.push_back(grid[n - 1]);
    std::sort(roots.begin(), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::unique1: return "unique-1";
        case Regime::unique2: return "unique-2";
        case Regime::unique3: return "unique-3";
        default: return "non-unique";
    }
}

namespace {

// Golden-section extremum refinement on log sigma2.
template <typename Fn>
double golden_refine(Fn&& f, double a, double b, bool maximize, int iters = 48) {
    const double gr = 0.61803398874989484820;
    double la = std::log(a), lb = std::log(b);
    double x1 = lb - gr * (lb - la), x2 = la + gr * (lb - la);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int i = 0; i < iters; ++i) {
        const bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
        if (keep_left) {
            lb = x2;
            x2 = x1;
            f2 = f1;
            x1 = lb - gr * (lb - la);
            f1 = f(std::exp(x1));
        } else {
            la = x1;
            x1 = x2;
            f1 = f2;
            x2 = la + gr * (lb - la);
            f2 = f(std::exp(x2));
        }
    }
    return std::exp(0.5 * (la + lb));
}

}  // namespace

ThresholdReport thresholds(const EffectivePrior& ep, double beta, const ThresholdOptions& opt) {
    const double var = ep.variance();
    const double lo = opt.lo_factor * var;
    const double hi = opt.hi_factor * var;
    const int n = opt.grid_points;

    auto psi_m = [&](double s2) { return psi_matched(ep, s2); };
    // d Psi(s2, s2) / d s2 by Richardson-extrapolated central differences.
    auto dpsi = [&](double s2) {
        const double d1 = (psi_m(s2 * (1 + opt.fd_rel_step)) - psi_m(s2 * (1 - opt.fd_rel_step))) /
                          (2.0 * s2 * opt.fd_rel_step);
        const double h2 = 0.5 * opt.fd_rel_step;
        const double d2 = (psi_m(s2 * (1 + h2)) - psi_m(s2 * (1 - h2))) / (2.0 * s2 * h2);
        return (4.0 * d2 - d1) / 3.0;
    };

    std::vector<double> grid(n), psis(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
        psis[i] = psi_m(grid[i]);
    }

    ThresholdReport rep;

    // ERT: beta_max = min over sigma2 of sigma2 / Psi.
    int imax = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (psis[i] <= 0.0) continue;  // Psi underflows for discrete priors at tiny sigma2
        const double r = grid[i] / psis[i];
        if (r < best_ratio) {
            best_ratio = r;
            imax = i;
        }
    }
    {
        const double a = grid[std::max(imax - 1, 0)];
        const double b = grid[std::min(imax + 1, n - 1)];
        const double s2 = golden_refine([&](double x) { return x / psi_m(x); }, a, b, false);
        rep.beta_max = std::min(best_ratio, s2 / psi_m(s2));
    }

    // MRT: beta_min = 1 / max d Psi / d sigma2.
    int imin = 0;
    double best_slope = -std::numeric_limits<double>::infinity();
    std::vector<double> slopes(n);
    for (int i = 0; i < n; ++i) {
        slopes[i] = dpsi(grid[i]);
        if (slopes[i] > best_slope) {
            best_slope = slopes[i];
            imin = i;
        }
    }
    {
        const double a = grid[std::max(imin - 1, 0)];
        const double b = grid[std::min(imin + 1, n - 1)];
        const double s2 = golden_refine(dpsi, a, b, true);
        rep.beta_min = 1.0 / std::max(best_slope, dpsi(s2));
    }

    // Critical noise pair: extrema of sigma2 - beta Psi over the stationary
    // set { beta dPsi = 1 }.
    std::vector<double> stationary;
    for (int i = 0; i + 1 < n; ++i) {
        const double qa = beta * slopes[i] - 1.0;
        const double qb = beta * slopes[i + 1] - 1.0;
        if (qa == 0.0) stationary.push_back(grid[i]);
        if (qa * qb < 0.0) {
            double a = grid[i], b = grid[i + 1], fa = qa;
            for (int it = 0; it < 48; ++it) {
                const double m = std::sqrt(a * b);
                const double fm = beta * dpsi(m) - 1.0;
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            stationary.push_back(0.5 * (a + b));
        }
    }
    if (!stationary.empty()) {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -std::numeric_limits<double>::infinity();
        for (double s2 : stationary) {
            const double v = s2 - beta * psi_m(s2);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        rep.n0_min = mn;
        rep.n0_max = mx;
    }
    return rep;
}

Regime classify_regime(const ThresholdReport& rep, double beta, double n0) {
    if (beta > 0.0 && beta <= rep.beta_min && n0 > 0.0) return Regime::unique1;
    if (beta > rep.beta_min && beta < rep.beta_max && rep.n0_min && rep.n0_max &&
        ((n0 >= 0.0 && n0 < *rep.n0_min) || n0 > *rep.n0_max))
        return Regime::unique2;
    if (beta >= rep.beta_max && rep.n0_max && n0 > *rep.n0_max) return Regime::unique3;
    return Regime::non_unique;
}

// ---------------------------------------------------------------------------

TunedSeResult se_tuned_laplace(double beta, double n0, const EffectivePrior& ep_true,
                               double nt_model, const SeOptions& opt, const TuneGrid& grid) {
    if (ep_true.field() != Field::real)
        throw std::invalid_argument("se_tuned_laplace: real-track prior required");
    if (!is_gaussian_mixture(ep_true))
        throw std::invalid_argument(
            "se_tuned_laplace: prior must be a Gaussian location/scale mixture");
    const auto dstar = matched_denoiser_real(ep_true);
    const double var_true = ep_true.variance();

    TunedSeResult out;
    double s2 = n0 + beta * var_true;
    out.trace.sigma2.push_back(s2);

    auto log_grid = [](double a, double b, int m) {
        std::vector<double> g(m);
        for (int i = 0; i < m; ++i)
            g[i] = std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (m - 1));
        return g;
    };

    double lam_best = 0.0, gam_best = 0.0, psi_best = 0.0;
    for (int t = 1; t <= opt.t_max; ++t) {
        const Nodes nodes = mixture_marginal_nodes(ep_true, s2, kRealNodes);
        const std::size_t K = nodes.z.size();
        std::vector<double> fstar(K);
        double e_gstar = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const MeanVar<double> mv = dstar->eval(nodes.z[k], s2);
            fstar[k] = mv.mean;
            e_gstar += nodes.w[k] * mv.var;
        }
        auto objective = [&](double lambda, double gamma2) {
            double acc = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double d = laplace_gauss_F(nodes.z[k], gamma2, lambda, nt_model) - fstar[k];
                acc += nodes.w[k] * d * d;
            }
            return acc + e_gstar;
        };

        // Same grid shape the SURE tuner uses, with the exact sigma_t^2 in
        // place of the residual estimate.
        const double lam_scale = 1.0 / std::sqrt(var_true + s2);
        const auto lams =
            log_grid(grid.lambda_lo * lam_scale, grid.lambda_hi * lam_scale, grid.lambda_points);
        const auto gams = log_grid(grid.gamma_lo * s2, grid.gamma_hi * s2, grid.gamma_points);
        psi_best = std::numeric_limits<double>::infinity();
        for (double g : gams)
            for (double l : lams) {
                const double v = objective(l, g);
                if (v < psi_best) {
                    psi_best = v;
                    lam_best = l;
                    gam_best = g;
                }
            }
        double fl = std::pow(lams.back() / lams.front(), 1.0 / (grid.lambda_points - 1));
        double fg = std::pow(gams.back() / gams.front(), 1.0 / (grid.gamma_points - 1));
        for (int round = 0; round < grid.refine_rounds; ++round) {
            fl = std::pow(fl, 1.0 / 3.0);
            fg = std::pow(fg, 1.0 / 3.0);
            double rl = lam_best, rg = gam_best;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b) {
                    if (a == 0 && b == 0) continue;
                    const double l = lam_best * std::pow(fl, a);
                    const double g = gam_best * std::pow(fg, b);
                    const double v = objective(l, g);
                    if (v < psi_best) {
                        psi_best = v;
                        rl = l;
                        rg = g;
                    }
                }
            lam_best = rl;
            gam_best = rg;
        }

        const double next = n0 + beta * psi_best;
        out.trace.sigma2.push_back(next);
        if (std::fabs(next - s2) <= opt.tol * s2) {
            out.trace.converged = true;
            s2 = next;
            break;
        }
        s2 = next;
    }
    out.trace.fixed_point = s2;
    out.lambda_final = lam_best;
    out.gamma2_final = gam_best;
    out.mse_x = psi_best;

    // Step 2: MMSE estimate of s from z = s + (e + w).
    const double v = ep_true.nt() + s2;
    const EffectivePrior ep_s(ep_true.prior(), InputNoiseModel{0.0}, Field::real);
    const auto dstar_s = matched_denoiser_real(ep_s);
    const double lam = lam_best, gam = gam_best;
    out.mse_s = expect_real(ep_s, v, [&](double z) {
        const MeanVar<double> star = dstar_s->eval(z, v);
        const double d = mmse_estimate(z, gam, lam, nt_model) - star.mean;
        return d * d + star.var;
    });
    const double es = prior_variance(ep_true.prior()) + std::norm(prior_mean(ep_true.prior()));
    out.rsnr_db = 10.0 * std::log10(es / out.mse_s);
    return out;
}

}  // namespace ampi
