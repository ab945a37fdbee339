#pragma once

#include <vector>

#include "ampi/ampi.hpp"
#include "ampi/model.hpp"

namespace ampi {

class NumericalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Noise whitening: W = sqrt(N0) Q^{-1/2} with Q = NT H H^H + N0 I, so the
// whitened total noise W(He + n) has covariance exactly N0 I.

template <typename MatT, typename VecT>
struct WhitenedSystem {
    MatT H_tilde;
    VecT y_tilde;
    double effective_n0 = 0.0;
};

using WhitenedC = WhitenedSystem<MatrixXcd, VectorXcd>;
using WhitenedR = WhitenedSystem<MatrixXd, VectorXd>;

WhitenedC whiten(const MatrixXcd& H, const VectorXcd& y, double nt, double n0);
WhitenedR whiten(const MatrixXd& H, const VectorXd& y, double nt, double n0);

/// Conventional AMP on the whitened system: input-noise-free denoiser for
/// the original signal prior. H_tilde is not i.i.d., so state-evolution
/// guarantees do not transfer; this is a performance-only baseline.
VectorXcd whitened_amp_run(const WhitenedC& ws, const Constellation& c, const AmpOptions& opt = {});
VectorXd whitened_amp_run(const WhitenedR& ws, const SureOptions& opt = {});

// ---------------------------------------------------------------------------
// Convex-optimization baseline: minimize
//   q(x) = ||y - Hx||^2 / (2 N0) - sum_i log p(x_i)
// for the Laplace-plus-Gaussian effective prior, by Polak-Ribiere nonlinear
// conjugate gradients with an Armijo backtracking line search.

double objective_q(const VectorXd& x, const VectorXd& y, const MatrixXd& H, double n0,
                   double lambda, double nt);
VectorXd grad_q(const VectorXd& x, const VectorXd& y, const MatrixXd& H, double n0, double lambda,
                double nt);

struct NcgOptions {
    int max_iter = 100;
    double grad_tol = 1e-6;      // stop on ||grad||_inf
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    int max_halvings = 60;
    bool map_to_signal = true;   // apply the E[S | x_hat] map to report s_hat
};

struct NcgResult {
    VectorXd x_hat;
    VectorXd s_hat;
    std::vector<double> objective;  // per accepted iterate, nonincreasing
    int iterations = 0;
    bool converged = false;
};

NcgResult ncg_solve(const VectorXd& y, const MatrixXd& H, double n0, double lambda, double nt,
                    const NcgOptions& opt = {});

// ---------------------------------------------------------------------------
// Support-oracle least squares: minimum-norm LS on the known support
// columns, zeros elsewhere.

VectorXd oracle_ls(const VectorXd& y, const MatrixXd& H, const std::vector<int>& support);

}  // namespace ampi
