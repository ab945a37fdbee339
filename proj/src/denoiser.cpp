#include "ampi/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampi/erfcx.hpp"

namespace ampi {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_mixture_args(double tau, const Constellation& c, double nt) {
    if (!(tau > 0.0)) throw std::invalid_argument("mixture denoiser: tau must be > 0");
    if (nt < 0.0) throw std::invalid_argument("mixture denoiser: nt must be >= 0");
    if (c.points.empty()) throw std::invalid_argument("mixture denoiser: empty constellation");
}

// Shared mixture algebra. exponent_scale = 1 for the complex track
// (|z-a|^2 / s2) and 1/2 for the real track.
template <typename Scalar>
MeanVar<Scalar> mixture_eval(Scalar z, double tau, const Constellation& c, double nt,
                             double exponent_scale) {
    const double s2 = nt + tau;        // marginal variance of z given s = a
    const double rho = nt / s2;        // posterior pull toward z
    const double v = nt * tau / s2;    // per-atom posterior variance
    const std::size_t n = c.points.size();

    thread_local std::vector<double> logw;
    logw.resize(n);
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Scalar a;
        if constexpr (std::is_same_v<Scalar, double>)
            a = c.points[i].real();
        else
            a = c.points[i];
        const double d2 = std::norm(z - a);
        logw[i] = (c.probs[i] > 0.0 ? std::log(c.probs[i]) : -1e300) - exponent_scale * d2 / s2;
        lmax = std::max(lmax, logw[i]);
    }
    double wsum = 0.0;
    Scalar mean{};
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(logw[i] - lmax);
        Scalar a;
        if constexpr (std::is_same_v<Scalar, double>)
            a = c.points[i].real();
        else
            a = c.points[i];
        const Scalar m = a + rho * (z - a);
        wsum += w;
        mean += w * m;
        second += w * (std::norm(m) + v);
    }
    mean /= wsum;
    second /= wsum;
    return {mean, std::max(second - std::norm(mean), 0.0)};
}

}  // namespace

MeanVar<std::complex<double>> mixture_FG(std::complex<double> z, double tau,
                                         const Constellation& c, double nt) {
    check_mixture_args(tau, c, nt);
    return mixture_eval<std::complex<double>>(z, tau, c, nt, 1.0);
}

std::complex<double> mixture_F(std::complex<double> z, double tau, const Constellation& c,
                               double nt) {
    return mixture_FG(z, tau, c, nt).mean;
}

double mixture_G(std::complex<double> z, double tau, const Constellation& c, double nt) {
    return mixture_FG(z, tau, c, nt).var;
}

MeanVar<double> mixture_FG_real(double z, double tau, const Constellation& c, double nt) {
    check_mixture_args(tau, c, nt);
    return mixture_eval<double>(z, tau, c, nt, 0.5);
}

MixtureDenoiser::MixtureDenoiser(Constellation c, double nt) : c_(std::move(c)), nt_(nt) {
    c_.validate();
    if (nt_ < 0.0) throw std::invalid_argument("mixture denoiser: nt must be >= 0");
}

MeanVar<std::complex<double>> MixtureDenoiser::eval(std::complex<double> z, double tau) const {
    check_mixture_args(tau, c_, nt_);
    return mixture_eval<std::complex<double>>(z, tau, c_, nt_, 1.0);
}

MixtureDenoiserReal::MixtureDenoiserReal(Constellation c, double nt) : c_(std::move(c)), nt_(nt) {
    c_.validate();
    if (!c_.is_real()) throw std::invalid_argument("real mixture denoiser: complex points");
    if (nt_ < 0.0) throw std::invalid_argument("mixture denoiser: nt must be >= 0");
}

MeanVar<double> MixtureDenoiserReal::eval(double z, double tau) const {
    check_mixture_args(tau, c_, nt_);
    return mixture_eval<double>(z, tau, c_, nt_, 0.5);
}

// ---------------------------------------------------------------------------

double laplace_eta(double z, double s2, double lambda) {
    if (s2 <= 0.0) return z > 0.0 ? -1.0 : (z < 0.0 ? 1.0 : 0.0);
    const double cs = 1.0 / std::sqrt(2.0 * s2);
    const double a = cs * z + lambda * s2 * cs;
    const double b = -cs * z + lambda * s2 * cs;
    // One argument very negative means its erfcx would overflow; the ratio
    // then saturates to +-1 to machine precision.
    if (b < -26.0) return -1.0;
    if (a < -26.0) return 1.0;
    const double A = erfcx(a), B = erfcx(b);
    return (A - B) / (A + B);
}

MeanVar<double> laplace_gauss_FG(double z, double tau, double lambda, double nt) {
    if (!(tau > 0.0)) throw std::invalid_argument("laplace denoiser: tau must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("laplace denoiser: lambda must be > 0");
    if (nt < 0.0) throw std::invalid_argument("laplace denoiser: nt must be >= 0");
    const double s2 = nt + tau;
    const double cs = 1.0 / std::sqrt(2.0 * s2);
    const double a = cs * z + lambda * s2 * cs;
    const double b = -cs * z + lambda * s2 * cs;
    if (b < -26.0 || a < -26.0) {
        // Deep in one Laplace tail: eta = -sign(z) exactly, and the
        // posterior variance collapses to tau.
        const double eta = (b < -26.0) ? -1.0 : 1.0;
        return {z + lambda * tau * eta, tau};
    }
    const double A = erfcx(a), B = erfcx(b);
    const double S = A + B;
    const double eta = (A - B) / S;
    const double F = z + lambda * tau * eta;
    // 1 - eta^2 = 4AB/S^2; keeping the product form avoids cancellation
    // when |eta| is close to 1.
    const double G =
        tau + (4.0 * lambda * tau * tau / S) * (lambda * A * B / S - 1.0 / std::sqrt(2.0 * kPi * s2));
    return {F, std::max(G, 0.0)};
}

double laplace_gauss_F(double z, double tau, double lambda, double nt) {
    return laplace_gauss_FG(z, tau, lambda, nt).mean;
}

double laplace_gauss_G(double z, double tau, double lambda, double nt) {
    return laplace_gauss_FG(z, tau, lambda, nt).var;
}

LaplaceGaussDenoiser::LaplaceGaussDenoiser(double lambda, double nt) : lambda_(lambda), nt_(nt) {
    if (!(lambda_ > 0.0)) throw std::invalid_argument("laplace denoiser: lambda must be > 0");
    if (nt_ < 0.0) throw std::invalid_argument("laplace denoiser: nt must be >= 0");
}

MeanVar<double> LaplaceGaussDenoiser::eval(double z, double tau) const {
    return laplace_gauss_FG(z, tau, lambda_, nt_);
}

// ---------------------------------------------------------------------------

ScaleMixtureDenoiser::ScaleMixtureDenoiser(std::vector<double> weights,
                                           std::vector<double> variances)
    : w_(std::move(weights)), v_(std::move(variances)) {
    if (w_.empty() || w_.size() != v_.size())
        throw std::invalid_argument("scale mixture: bad component lists");
}

ScaleMixtureDenoiser ScaleMixtureDenoiser::bernoulli_gaussian(double kappa, double nt) {
    return ScaleMixtureDenoiser({1.0 - kappa, kappa}, {nt, 1.0 + nt});
}

MeanVar<double> ScaleMixtureDenoiser::eval(double z, double tau) const {
    if (!(tau > 0.0)) throw std::invalid_argument("scale mixture: tau must be > 0");
    const std::size_t n = w_.size();
    double lmax = -std::numeric_limits<double>::infinity();
    thread_local std::vector<double> logw;
    logw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 = v_[i] + tau;  // marginal variance of z for component i
        logw[i] = (w_[i] > 0.0 ? std::log(w_[i]) : -1e300) - 0.5 * std::log(m2) -
                  0.5 * z * z / m2;
        lmax = std::max(lmax, logw[i]);
    }
    double wsum = 0.0, mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(logw[i] - lmax);
        const double rho = v_[i] / (v_[i] + tau);
        wsum += w;
        mean += w * rho * z;
        second += w * (rho * rho * z * z + rho * tau);
    }
    mean /= wsum;
    second /= wsum;
    return {mean, std::max(second - mean * mean, 0.0)};
}

// ---------------------------------------------------------------------------

std::unique_ptr<DenoiserR> matched_denoiser_real(const EffectivePrior& ep) {
    if (ep.field() != Field::real)
        throw std::invalid_argument("matched_denoiser_real: complex-track prior");
    if (const auto* c = std::get_if<Constellation>(&ep.prior()))
        return std::make_unique<MixtureDenoiserReal>(*c, ep.nt());
    if (const auto* l = std::get_if<LaplacePrior>(&ep.prior()))
        return std::make_unique<LaplaceGaussDenoiser>(l->lambda, ep.nt());
    const double k = std::get<BernoulliGaussianPrior>(ep.prior()).kappa;
    return std::make_unique<ScaleMixtureDenoiser>(ScaleMixtureDenoiser::bernoulli_gaussian(k, ep.nt()));
}

std::unique_ptr<DenoiserC> matched_denoiser_complex(const EffectivePrior& ep) {
    if (ep.field() != Field::cplx)
        throw std::invalid_argument("matched_denoiser_complex: real-track prior");
    const auto& c = std::get<Constellation>(ep.prior());
    return std::make_unique<MixtureDenoiser>(c, ep.nt());
}

}  // namespace ampi
