#include "ampi/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampi/erfcx.hpp"

namespace ampi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gauss_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
}

// Laplace(lambda) convolved with N(0, nt), written with erfcx so neither
// factor overflows: p(x) = (lambda/4) exp(-x^2/(2 nt)) [erfcx(a0) + erfcx(b0)]
// with a0 = (x + lambda nt)/sqrt(2 nt), b0 = (-x + lambda nt)/sqrt(2 nt).
// Once b0(|x|) drops below -25 the Laplace tail dominates to machine
// precision and the exact exponent -lambda|x| + lambda^2 nt / 2 is used.
double laplace_gauss_log_density(double x, double lambda, double nt) {
    const double u = std::fabs(x);
    if (nt <= 0.0) return std::log(0.5 * lambda) - lambda * u;
    const double s = std::sqrt(2.0 * nt);
    const double b0 = (-u + lambda * nt) / s;
    if (b0 < -25.0) return std::log(0.5 * lambda) + 0.5 * lambda * lambda * nt - lambda * u;
    const double a0 = (u + lambda * nt) / s;
    return std::log(0.25 * lambda) - u * u / (2.0 * nt) + std::log(erfcx(a0) + erfcx(b0));
}

}  // namespace

std::complex<double> prior_mean(const SignalPrior& p) {
    if (const auto* c = std::get_if<Constellation>(&p)) return c->mean();
    return {0.0, 0.0};  // Laplace and Bernoulli-Gaussian are zero-mean
}

double prior_variance(const SignalPrior& p) {
    if (const auto* c = std::get_if<Constellation>(&p)) return c->variance();
    if (const auto* l = std::get_if<LaplacePrior>(&p)) return 2.0 / (l->lambda * l->lambda);
    return std::get<BernoulliGaussianPrior>(p).kappa;
}

EffectivePrior::EffectivePrior(SignalPrior prior, InputNoiseModel noise, Field field)
    : prior_(std::move(prior)), noise_(noise), field_(field) {
    if (noise_.nt < 0.0) throw std::invalid_argument("effective prior: nt must be >= 0");
    if (const auto* c = std::get_if<Constellation>(&prior_)) {
        c->validate();
        if (field_ == Field::real && !c->is_real())
            throw std::invalid_argument("effective prior: complex constellation on real track");
    } else if (const auto* l = std::get_if<LaplacePrior>(&prior_)) {
        if (!(l->lambda > 0.0)) throw std::invalid_argument("effective prior: lambda must be > 0");
        if (field_ != Field::real) throw std::invalid_argument("Laplace prior is real-valued");
    } else {
        const double k = std::get<BernoulliGaussianPrior>(prior_).kappa;
        if (!(k >= 0.0 && k <= 1.0))
            throw std::invalid_argument("effective prior: kappa must be in [0,1]");
        if (field_ != Field::real)
            throw std::invalid_argument("Bernoulli-Gaussian prior is real-valued");
    }
    mean_ = prior_mean(prior_);
    var_ = prior_variance(prior_) + noise_.nt;  // s and e independent
}

bool EffectivePrior::has_density() const {
    if (std::holds_alternative<LaplacePrior>(prior_)) return true;
    return noise_.nt > 0.0;
}

double EffectivePrior::density(double x) const {
    if (field_ != Field::real) throw std::invalid_argument("density(double) on complex track");
    if (!has_density())
        throw std::invalid_argument("effective prior is atomic; no density to evaluate");
    const double nt = noise_.nt;
    if (const auto* c = std::get_if<Constellation>(&prior_)) {
        double p = 0.0;
        for (std::size_t i = 0; i < c->points.size(); ++i)
            p += c->probs[i] * gauss_pdf(x, c->points[i].real(), nt);
        return p;
    }
    if (const auto* l = std::get_if<LaplacePrior>(&prior_))
        return std::exp(laplace_gauss_log_density(x, l->lambda, nt));
    const double k = std::get<BernoulliGaussianPrior>(prior_).kappa;
    return (1.0 - k) * gauss_pdf(x, 0.0, nt) + k * gauss_pdf(x, 0.0, 1.0 + nt);
}

double EffectivePrior::log_density(double x) const {
    if (field_ != Field::real) throw std::invalid_argument("log_density on complex track");
    if (!has_density())
        throw std::invalid_argument("effective prior is atomic; no density to evaluate");
    if (const auto* l = std::get_if<LaplacePrior>(&prior_))
        return laplace_gauss_log_density(x, l->lambda, noise_.nt);
    // Mixtures of a few Gaussians: log-sum-exp over components.
    std::vector<double> logs;
    if (const auto* c = std::get_if<Constellation>(&prior_)) {
        for (std::size_t i = 0; i < c->points.size(); ++i) {
            const double d = x - c->points[i].real();
            logs.push_back(std::log(c->probs[i]) - 0.5 * d * d / noise_.nt -
                           0.5 * std::log(2.0 * kPi * noise_.nt));
        }
    } else {
        const double k = std::get<BernoulliGaussianPrior>(prior_).kappa;
        const double v0 = noise_.nt, v1 = 1.0 + noise_.nt;
        if (k < 1.0)
            logs.push_back(std::log1p(-k) - 0.5 * x * x / v0 - 0.5 * std::log(2.0 * kPi * v0));
        if (k > 0.0)
            logs.push_back(std::log(k) - 0.5 * x * x / v1 - 0.5 * std::log(2.0 * kPi * v1));
    }
    const double m = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - m);
    return m + std::log(acc);
}

double EffectivePrior::density(std::complex<double> x) const {
    if (field_ != Field::cplx) throw std::invalid_argument("density(complex) on real track");
    if (!has_density())
        throw std::invalid_argument("effective prior is atomic; no density to evaluate");
    const auto& c = std::get<Constellation>(prior_);
    const double nt = noise_.nt;
    double p = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i)
        p += c.probs[i] * std::exp(-std::norm(x - c.points[i]) / nt) / (kPi * nt);
    return p;
}

EffectivePrior EffectivePrior::with_extra_noise(double sigma2) const {
    if (sigma2 < 0.0) throw std::invalid_argument("with_extra_noise: sigma2 must be >= 0");
    return EffectivePrior(prior_, InputNoiseModel{noise_.nt + sigma2}, field_);
}

}  // namespace ampi
