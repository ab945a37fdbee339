#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ampi/priors.hpp"

namespace ampi {

template <typename Scalar>
struct MeanVar {
    Scalar mean;
    double var;
};

/// Scalar posterior map for the observation z = x + w, w Gaussian with the
/// assumed variance tau: mean and variance of x given z. Immutable and
/// reentrant; the AMP engine applies it element-wise.
template <typename Scalar>
class Denoiser {
  public:
    virtual ~Denoiser() = default;
    virtual MeanVar<Scalar> eval(Scalar z, double tau) const = 0;
    Scalar F(Scalar z, double tau) const { return eval(z, tau).mean; }
    double G(Scalar z, double tau) const { return eval(z, tau).var; }
};

using DenoiserC = Denoiser<std::complex<double>>;
using DenoiserR = Denoiser<double>;

// ---------------------------------------------------------------------------
// Gaussian-mixture effective prior (discrete constellation + Gaussian input
// noise). Posterior weights use max-log normalization so nothing underflows
// at high SNR.

std::complex<double> mixture_F(std::complex<double> z, double tau, const Constellation& c,
                               double nt);
double mixture_G(std::complex<double> z, double tau, const Constellation& c, double nt);
MeanVar<std::complex<double>> mixture_FG(std::complex<double> z, double tau,
                                         const Constellation& c, double nt);

/// Real-track variant (real constellation points, real Gaussian noise).
MeanVar<double> mixture_FG_real(double z, double tau, const Constellation& c, double nt);

class MixtureDenoiser final : public DenoiserC {
  public:
    MixtureDenoiser(Constellation c, double nt);
    MeanVar<std::complex<double>> eval(std::complex<double> z, double tau) const override;
    const Constellation& constellation() const { return c_; }
    double nt() const { return nt_; }

  private:
    Constellation c_;
    double nt_;
};

class MixtureDenoiserReal final : public DenoiserR {
  public:
    MixtureDenoiserReal(Constellation c, double nt);
    MeanVar<double> eval(double z, double tau) const override;

  private:
    Constellation c_;
    double nt_;
};

// ---------------------------------------------------------------------------
// Laplace prior + Gaussian input noise (real track).

/// eta = (erfcx(a) - erfcx(b)) / (erfcx(a) + erfcx(b)) with
/// a = (z + lambda s2)/sqrt(2 s2), b = (-z + lambda s2)/sqrt(2 s2) and
/// s2 = nt + tau. The larger erfcx is factored out, so eta saturates to
/// exactly -sign(z) in the far tails instead of overflowing. s2 = 0
/// degenerates to -sign(z).
double laplace_eta(double z, double s2, double lambda);

double laplace_gauss_F(double z, double tau, double lambda, double nt);
double laplace_gauss_G(double z, double tau, double lambda, double nt);
MeanVar<double> laplace_gauss_FG(double z, double tau, double lambda, double nt);

class LaplaceGaussDenoiser final : public DenoiserR {
  public:
    LaplaceGaussDenoiser(double lambda, double nt);
    MeanVar<double> eval(double z, double tau) const override;
    double lambda() const { return lambda_; }
    double nt() const { return nt_; }

  private:
    double lambda_;
    double nt_;
};

// ---------------------------------------------------------------------------
// Zero-mean Gaussian scale mixture (the effective prior of a
// Bernoulli-Gaussian signal under Gaussian input noise).

class ScaleMixtureDenoiser final : public DenoiserR {
  public:
    ScaleMixtureDenoiser(std::vector<double> weights, std::vector<double> variances);
    static ScaleMixtureDenoiser bernoulli_gaussian(double kappa, double nt);
    MeanVar<double> eval(double z, double tau) const override;

  private:
    std::vector<double> w_, v_;
};

// ---------------------------------------------------------------------------

/// Posterior-mean/variance map matched to the effective prior (the Bayes
/// denoiser used by cB-AMP and by state evolution).
std::unique_ptr<DenoiserR> matched_denoiser_real(const EffectivePrior& ep);
std::unique_ptr<DenoiserC> matched_denoiser_complex(const EffectivePrior& ep);

}  // namespace ampi
