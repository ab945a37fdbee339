#pragma once

#include <complex>
#include <vector>

#include "ampi/amp.hpp"
#include "ampi/constellation.hpp"
#include "ampi/model.hpp"

namespace ampi {

// ---------------------------------------------------------------------------
// Step 2 of the two-step pipeline: estimate s from the decoupled output
// z = s + (e + w), where e + w is Gaussian with variance nt + sigma2.

/// MAP symbol decision argmax_a p_a exp(-|z-a|^2/(nt+sigma2)). Ties break
/// toward the lowest constellation index.
std::complex<double> map_detect(std::complex<double> z, double sigma2, const Constellation& c,
                                double nt);
int map_detect_index(std::complex<double> z, double sigma2, const Constellation& c, double nt);

/// Posterior mean of a Laplace(lambda) signal observed through Gaussian
/// noise of variance nt + sigma2.
double mmse_estimate(double z, double sigma2, double lambda, double nt);

// ---------------------------------------------------------------------------
// Pipelines.

struct MimoResult {
    VectorXcd s_hat;
    DecoupledOutput<std::complex<double>> decoupled;
};

/// cB-AMP with the Gaussian-mixture denoiser followed by element-wise MAP
/// detection. nt_model = 0 reproduces the input-noise-blind detector (LAMA).
MimoResult ampi_map_run(const MatrixXcd& H, const VectorXcd& y, const Constellation& c,
                        double nt_model, double n0, const AmpOptions& opt = {});

struct TunedParams {
    double lambda;
    double gamma2;
};

struct CsResult {
    VectorXd s_hat;
    VectorXd x_hat;
    DecoupledOutput<double> decoupled;
    std::vector<TunedParams> tuned;  // per-iteration, only for the SURE run
};

/// cB-AMP with a fixed-lambda Laplace-Gaussian denoiser followed by the
/// element-wise MMSE step.
CsResult ampi_mmse_run(const MatrixXd& H, const VectorXd& y, double lambda, double nt_model,
                       double n0, const AmpOptions& opt = {});

// ---------------------------------------------------------------------------
// SURE-tuned variant for sparse recovery.

/// Estimate of the denoiser MSE from the data alone:
///   (1/N)||F(z,g2,l) - z||^2 + sigma2 + (2 sigma2 / g2) (<G(z,g2,l)> - g2).
/// The trailing term is the canonical SURE divergence; see the project notes
/// on the units of the <G - 1> form.
double sure_objective_sigma(const VectorXd& z, double sigma2, double gamma2, double lambda,
                            double nt);
/// Same with sigma2 estimated as ||r||^2 / M.
double sure_objective(const VectorXd& z, const VectorXd& r, double gamma2, double lambda,
                      double nt);

struct TuneGrid {
    int lambda_points = 40;
    double lambda_lo = 0.01, lambda_hi = 100.0;  // scaled by 1/sqrt(<z^2>)
    int gamma_points = 40;
    double gamma_lo = 0.1, gamma_hi = 10.0;  // scaled by sigma2
    int refine_rounds = 2;
};

/// Deterministic minimizer of the SURE objective over a log-spaced
/// (lambda, gamma^2) grid with local 3x3 refinement.
TunedParams tune_params_sigma(const VectorXd& z, double sigma2, double nt,
                              const TuneGrid& grid = {});
TunedParams tune_params(const VectorXd& z, const VectorXd& r, double nt,
                        const TuneGrid& grid = {});

struct SureOptions {
    int t_max = 100;
    double x_stop_tol = 1e-9;  // relative change of x_hat
    int min_iterations = 5;
    double divergence_factor = 1e6;
    TuneGrid grid;
};

/// Per-iteration SURE tuning of (lambda_t, gamma_t^2), then the MMSE step
/// with the last tuned pair.
CsResult ampi_sure_run(const MatrixXd& H, const VectorXd& y, double nt_model,
                       const SureOptions& opt = {});

}  // namespace ampi
