#include "ampi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ampi {

namespace {

GaussHermite compute_gauss_hermite(int n) {
    // Golub-Welsch: eigen-decomposition of the Hermite Jacobi matrix.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(i / 2.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermite gh;
    gh.nodes.resize(n);
    gh.weights.resize(n);
    const double sqrt_pi = 1.7724538509055160273;
    for (int i = 0; i < n; ++i) {
        gh.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        gh.weights[i] = sqrt_pi * v0 * v0;
    }
    return gh;
}

constexpr int kOracleNodes = 96;  // per dimension

}  // namespace

const GaussHermite& gauss_hermite(int n) {
    static std::mutex mu;
    static std::map<int, GaussHermite> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_hermite(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                 int max_depth) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, max_depth, rel_tol);
}

double support_radius(const EffectivePrior& ep) {
    const double nt = ep.nt();
    if (const auto* c = std::get_if<Constellation>(&ep.prior())) {
        double r = 0.0;
        for (const auto& p : c->points) r = std::max(r, std::abs(p));
        return r + 13.0 * std::sqrt(nt);
    }
    if (const auto* l = std::get_if<LaplacePrior>(&ep.prior()))
        return 75.0 / l->lambda + 13.0 * std::sqrt(nt);
    return 13.0 * std::sqrt(1.0 + nt);  // Bernoulli-Gaussian
}

// --------------------------------------------------------------------------
// Real track.

namespace {

// Exact weighted atom sum for an atomic prior (nt = 0).
MeanVar<double> atom_sum_real(const Constellation& c, double z, double tau) {
    const std::size_t n = c.points.size();
    std::vector<double> logw(n);
    double lmax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = c.points[i].real();
        logw[i] = (c.probs[i] > 0 ? std::log(c.probs[i]) : -1e300) - (z - a) * (z - a) / (2.0 * tau);
        lmax = std::max(lmax, logw[i]);
    }
    double wsum = 0, m = 0, s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(logw[i] - lmax);
        const double a = c.points[i].real();
        wsum += w;
        m += w * a;
        s += w * a * a;
    }
    m /= wsum;
    s /= wsum;
    return {m, std::max(s - m * m, 0.0)};
}

// Sum over atoms, Gauss-Hermite over the input-noise Gaussian around each
// atom, likelihood exp(-(z-x)^2/(2 tau)) as the integrand factor.
MeanVar<double> atom_gh_real(const Constellation& c, double nt, double z, double tau) {
    const auto& gh = gauss_hermite(kOracleNodes);
    const double sn = std::sqrt(2.0 * nt);
    std::vector<double> lt;
    std::vector<double> xs;
    lt.reserve(c.points.size() * gh.nodes.size());
    xs.reserve(lt.capacity());
    double lmax = -1e300;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const double a = c.points[i].real();
        const double lp = c.probs[i] > 0 ? std::log(c.probs[i]) : -1e300;
        for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
            const double x = a + sn * gh.nodes[j];
            const double t = lp + std::log(gh.weights[j]) - (z - x) * (z - x) / (2.0 * tau);
            lt.push_back(t);
            xs.push_back(x);
            lmax = std::max(lmax, t);
        }
    }
    double wsum = 0, m = 0;
    for (std::size_t k = 0; k < lt.size(); ++k) {
        const double w = std::exp(lt[k] - lmax);
        wsum += w;
        m += w * xs[k];
    }
    m /= wsum;
    double v = 0;
    for (std::size_t k = 0; k < lt.size(); ++k)
        v += std::exp(lt[k] - lmax) * (xs[k] - m) * (xs[k] - m);
    return {m, v / wsum};
}

// Gauss-Hermite against the likelihood, prior density as the integrand
// factor. Valid when the density is smooth on the sqrt(tau) scale.
MeanVar<double> z_gh_real(const EffectivePrior& ep, double z, double tau) {
    const auto& gh = gauss_hermite(kOracleNodes);
    const double st = std::sqrt(2.0 * tau);
    std::vector<double> lt(gh.nodes.size());
    std::vector<double> xs(gh.nodes.size());
    double lmax = -1e300;
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
        const double x = z + st * gh.nodes[j];
        xs[j] = x;
        lt[j] = std::log(gh.weights[j]) + ep.log_density(x);
        lmax = std::max(lmax, lt[j]);
    }
    double wsum = 0, m = 0;
    for (std::size_t k = 0; k < lt.size(); ++k) {
        const double w = std::exp(lt[k] - lmax);
        wsum += w;
        m += w * xs[k];
    }
    m /= wsum;
    double v = 0;
    for (std::size_t k = 0; k < lt.size(); ++k)
        v += std::exp(lt[k] - lmax) * (xs[k] - m) * (xs[k] - m);
    return {m, v / wsum};
}

// Adaptive Gauss-Kronrod over the full posterior, log-stabilized.
MeanVar<double> gk_real(const EffectivePrior& ep, double z, double tau) {
    const double R = support_radius(ep);
    const double lo = std::min(z - 13.0 * std::sqrt(tau), -R);
    const double hi = std::max(z + 13.0 * std::sqrt(tau), R);
    // Coarse scan for the log-posterior maximum, used only for scaling.
    const int scan = 4001;
    double lmax = -1e300;
    for (int i = 0; i < scan; ++i) {
        const double x = lo + (hi - lo) * i / (scan - 1);
        lmax = std::max(lmax, ep.log_density(x) - (z - x) * (z - x) / (2.0 * tau));
    }
    const double M = lmax;
    auto post = [&](double x) {
        return std::exp(ep.log_density(x) - (z - x) * (z - x) / (2.0 * tau) - M);
    };
    const double i0 = integrate(post, lo, hi);
    const double i1 = integrate([&](double x) { return (x - z) * post(x); }, lo, hi);
    const double mean = z + i1 / i0;
    const double iv =
        integrate([&](double x) { return (x - mean) * (x - mean) * post(x); }, lo, hi);
    return {mean, std::max(iv / i0, 0.0)};
}

}  // namespace

MeanVar<double> quadrature_fg(const EffectivePrior& ep, double z, double tau) {
    if (ep.field() != Field::real) throw std::invalid_argument("quadrature_fg: field mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("quadrature_fg: tau must be > 0");
    if (const auto* c = std::get_if<Constellation>(&ep.prior())) {
        if (ep.nt() == 0.0) return atom_sum_real(*c, z, tau);
        // Center nodes on whichever factor is narrower.
        return tau > ep.nt() ? atom_gh_real(*c, ep.nt(), z, tau) : z_gh_real(ep, z, tau);
    }
    return gk_real(ep, z, tau);
}

// --------------------------------------------------------------------------
// Complex track (discrete constellation + circular Gaussian input noise).

namespace {

MeanVar<std::complex<double>> atom_sum_complex(const Constellation& c, std::complex<double> z,
                                               double tau) {
    const std::size_t n = c.points.size();
    std::vector<double> logw(n);
    double lmax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        logw[i] =
            (c.probs[i] > 0 ? std::log(c.probs[i]) : -1e300) - std::norm(z - c.points[i]) / tau;
        lmax = std::max(lmax, logw[i]);
    }
    double wsum = 0, s = 0;
    std::complex<double> m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(logw[i] - lmax);
        wsum += w;
        m += w * c.points[i];
        s += w * std::norm(c.points[i]);
    }
    m /= wsum;
    s /= wsum;
    return {m, std::max(s - std::norm(m), 0.0)};
}

template <typename NodeFn>
MeanVar<std::complex<double>> grid_moments(std::size_t count, NodeFn&& node) {
    // node(k) -> (x, log term); two passes share the evaluations.
    std::vector<std::complex<double>> xs(count);
    std::vector<double> lt(count);
    double lmax = -1e300;
    for (std::size_t k = 0; k < count; ++k) {
        auto [x, t] = node(k);
        xs[k] = x;
        lt[k] = t;
        lmax = std::max(lmax, t);
    }
    double wsum = 0;
    std::complex<double> m = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double w = std::exp(lt[k] - lmax);
        wsum += w;
        m += w * xs[k];
    }
    m /= wsum;
    double v = 0;
    for (std::size_t k = 0; k < count; ++k) v += std::exp(lt[k] - lmax) * std::norm(xs[k] - m);
    return {m, v / wsum};
}

MeanVar<std::complex<double>> atom_gh_complex(const Constellation& c, double nt,
                                              std::complex<double> z, double tau) {
    const auto& gh = gauss_hermite(kOracleNodes);
    const std::size_t g = gh.nodes.size();
    const double sn = std::sqrt(nt);
    const std::size_t count = c.points.size() * g * g;
    return grid_moments(count, [&](std::size_t k) {
        const std::size_t i = k / (g * g);
        const std::size_t j = (k / g) % g;
        const std::size_t l = k % g;
        const std::complex<double> x =
            c.points[i] + sn * std::complex<double>(gh.nodes[j], gh.nodes[l]);
        const double t = (c.probs[i] > 0 ? std::log(c.probs[i]) : -1e300) +
                         std::log(gh.weights[j]) + std::log(gh.weights[l]) -
                         std::norm(z - x) / tau;
        return std::pair{x, t};
    });
}

MeanVar<std::complex<double>> z_gh_complex(const EffectivePrior& ep, std::complex<double> z,
                                           double tau) {
    const auto& gh = gauss_hermite(kOracleNodes);
    const std::size_t g = gh.nodes.size();
    const double st = std::sqrt(tau);
    return grid_moments(g * g, [&](std::size_t k) {
        const std::size_t j = k / g;
        const std::size_t l = k % g;
        const std::complex<double> x = z + st * std::complex<double>(gh.nodes[j], gh.nodes[l]);
        const double t =
            std::log(gh.weights[j]) + std::log(gh.weights[l]) + std::log(ep.density(x));
        return std::pair{x, t};
    });
}

}  // namespace

MeanVar<std::complex<double>> quadrature_fg(const EffectivePrior& ep, std::complex<double> z,
                                            double tau) {
    if (ep.field() != Field::cplx) throw std::invalid_argument("quadrature_fg: field mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("quadrature_fg: tau must be > 0");
    const auto& c = std::get<Constellation>(ep.prior());
    if (ep.nt() == 0.0) return atom_sum_complex(c, z, tau);
    return tau > ep.nt() ? atom_gh_complex(c, ep.nt(), z, tau) : z_gh_complex(ep, z, tau);
}

}  // namespace ampi
