#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "ampi/denoiser.hpp"
#include "ampi/priors.hpp"

namespace ampi {

/// Nodes/weights for integral f(u) exp(-u^2) du. Cached per order.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussHermite& gauss_hermite(int n);

/// Adaptive Gauss-Kronrod integral of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-12, int max_depth = 15);

/// Radius R such that the effective prior carries essentially no mass
/// (< 1e-30 of it) outside [-R, R]; used to truncate quadrature domains.
double support_radius(const EffectivePrior& ep);

/// Posterior mean/variance of x given z = x + w, Var w = tau, computed by
/// numerical integration only (atom sums for discrete priors, Gauss-Hermite
/// or adaptive Gauss-Kronrod otherwise). Validation oracle for the
/// closed-form denoisers; absolute accuracy target 1e-10.
MeanVar<double> quadrature_fg(const EffectivePrior& ep, double z, double tau);
MeanVar<std::complex<double>> quadrature_fg(const EffectivePrior& ep, std::complex<double> z,
                                            double tau);

}  // namespace ampi
