#pragma once

#include <optional>
#include <vector>

#include "ampi/ampi.hpp"
#include "ampi/denoiser.hpp"
#include "ampi/priors.hpp"

namespace ampi {

// ---------------------------------------------------------------------------
// MSE functional Psi(sigma2, gamma2) = E_{X,Z} |F(X + sigma Z, gamma2) - X|^2.
//
// Evaluated through the law of total variance: with F*, G* the exact
// posterior mean/variance at the true sigma2,
//   Psi = E_z[ |F(z, gamma2) - F*(z, sigma2)|^2 + G*(z, sigma2) ],
// which needs only a one (real) or two (complex) dimensional quadrature
// against the closed-form marginal of z. The matched diagonal reduces to
// E_z[G*] exactly.

double psi(const EffectivePrior& ep, const DenoiserR& d, double sigma2, double gamma2);
double psi(const EffectivePrior& ep, const DenoiserC& d, double sigma2, double gamma2);
/// Psi(sigma2, sigma2) with the matched (Bayes) denoiser.
double psi_matched(const EffectivePrior& ep, double sigma2);

// ---------------------------------------------------------------------------

struct SeOptions {
    int t_max = 200;
    double tol = 1e-9;  // relative change of sigma2
};

struct SeTrace {
    std::vector<double> sigma2;  // sigma2[0] = N0 + beta Var[X]
    bool converged = false;
    double fixed_point = 0.0;
};

/// The recursion sigma_{t+1}^2 = N0 + beta Psi(sigma_t^2, sigma_t^2) from the
/// standard initialization, with the matched denoiser.
SeTrace se_recursion(double beta, double n0, const EffectivePrior& ep, const SeOptions& opt = {});

/// All solutions of sigma2 = N0 + beta Psi(sigma2, sigma2) found by a
/// 400-point log-grid scan refined by bisection; sorted ascending.
std::vector<double> fixed_points(double beta, double n0, const EffectivePrior& ep);

// ---------------------------------------------------------------------------
// Recovery thresholds and uniqueness regimes.

enum class Regime { unique1, unique2, unique3, non_unique };
const char* regime_name(Regime r);

struct ThresholdReport {
    double beta_min = 0.0;  // minimum recovery threshold (MRT)
    double beta_max = 0.0;  // exact recovery threshold (ERT)
    std::optional<double> n0_min;  // given beta; absent if no stationary point
    std::optional<double> n0_max;
    Regime regime = Regime::non_unique;
};

struct ThresholdOptions {
    int grid_points = 281;
    double lo_factor = 1e-10;  // times Var[X]
    double hi_factor = 1e4;
    double fd_rel_step = 1e-4;  // Richardson-extrapolated central differences
};

/// MRT/ERT from the matched Psi, plus the critical noise pair for the given
/// system ratio.
ThresholdReport thresholds(const EffectivePrior& ep, double beta,
                           const ThresholdOptions& opt = {});

/// Lemma-style uniqueness classification; non_unique means "uniqueness not
/// guaranteed by the three regimes", not "provably multiple".
Regime classify_regime(const ThresholdReport& rep, double beta, double n0);

// ---------------------------------------------------------------------------
// Deterministic counterpart of the SURE-tuned pipeline: per iteration the
// (lambda, gamma2) pair minimizes the true Psi over the same grid the tuner
// uses, under the true effective prior of the data.

struct TunedSeResult {
    SeTrace trace;
    double lambda_final = 0.0;
    double gamma2_final = 0.0;
    double mse_x = 0.0;      // fixed-point Psi
    double mse_s = 0.0;      // after the MMSE step on s
    double rsnr_db = 0.0;    // 10 log10(Es / mse_s)
};

TunedSeResult se_tuned_laplace(double beta, double n0, const EffectivePrior& ep_true,
                               double nt_model, const SeOptions& opt = {},
                               const TuneGrid& grid = {});

}  // namespace ampi
