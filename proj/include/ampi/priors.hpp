#pragma once

#include <complex>
#include <variant>

#include "ampi/constellation.hpp"

namespace ampi {

enum class Field { real, cplx };

/// i.i.d. Laplace prior p(s) = (lambda/2) exp(-lambda |s|), lambda > 0.
struct LaplacePrior {
    double lambda;
};

/// Bernoulli-Gaussian: nonzero with probability kappa, value ~ N(0,1).
/// Used to generate sparse test signals; its effective prior is a two
/// component zero-mean Gaussian scale mixture.
struct BernoulliGaussianPrior {
    double kappa;
};

using SignalPrior = std::variant<Constellation, LaplacePrior, BernoulliGaussianPrior>;

/// Additive Gaussian input noise p(x|s) = N(s, nt) (CN(s, nt) on the complex
/// track). The single extension point for other impairment models.
struct InputNoiseModel {
    double nt = 0.0;
};

/// Distribution of the effective input x = s + e induced by a signal prior
/// and an input-noise model: p(x) = integral p(x|s) p(s) ds. Moments are
/// closed form; the density is closed form for every supported prior.
class EffectivePrior {
  public:
    EffectivePrior(SignalPrior prior, InputNoiseModel noise, Field field);

    const SignalPrior& prior() const { return prior_; }
    double nt() const { return noise_.nt; }
    Field field() const { return field_; }

    std::complex<double> mean() const { return mean_; }
    double mean_real() const { return mean_.real(); }
    /// E|X - E X|^2 (sum over both real dimensions on the complex track).
    double variance() const { return var_; }

    /// False when the distribution carries point masses (discrete prior or
    /// Bernoulli-Gaussian with nt = 0); density() then throws and the atoms
    /// are available through the constellation itself.
    bool has_density() const;

    /// Density of x on the real track.
    double density(double x) const;
    /// log density on the real track, stable in the far tails.
    double log_density(double x) const;
    /// Density of x on the complex track (discrete prior + Gaussian noise).
    double density(std::complex<double> x) const;

    /// Same prior observed through additional Gaussian noise of the given
    /// variance: the marginal law of z = x + w, w ~ N(0, sigma2).
    EffectivePrior with_extra_noise(double sigma2) const;

  private:
    SignalPrior prior_;
    InputNoiseModel noise_;
    Field field_;
    std::complex<double> mean_;
    double var_;
};

/// Moments of the pure signal prior (no input noise).
std::complex<double> prior_mean(const SignalPrior& p);
double prior_variance(const SignalPrior& p);

}  // namespace ampi
