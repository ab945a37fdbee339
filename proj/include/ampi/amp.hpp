#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ampi/denoiser.hpp"
#include "ampi/priors.hpp"

namespace ampi {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Mutable per-trial state of the cB-AMP iteration.
template <typename Scalar>
struct AmpState {
    VecX<Scalar> x_hat;   // current estimate of x
    VecX<Scalar> r;       // residual
    VecX<Scalar> z;       // Gaussian output of the last completed step
    double gamma2 = 0.0;  // threshold for the next denoiser call
    double z_gamma2 = 0.0;  // threshold at which z was formed
    int t = 1;
};

struct IterRecord {
    double gamma2;           // threshold used in this iteration
    double mean_g;           // <G(z, gamma2)>
    double residual_energy;  // ||r||^2 / M entering the iteration
};

template <typename Scalar>
struct DecoupledOutput {
    VecX<Scalar> z;
    double sigma2_hat = 0.0;  // effective-noise-variance estimate (final gamma^2)
    std::vector<IterRecord> trace;
    int iterations = 0;
};

class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& what, std::vector<IterRecord> trace)
        : std::runtime_error(what), trace(std::move(trace)) {}
    std::vector<IterRecord> trace;
};

struct AmpOptions {
    int t_max = 100;
    double stop_tol = 1e-6;  // relative change of gamma^2
    double damping = 0.0;    // new <- (1-d)*new + d*old on x_hat and gamma^2
    double divergence_factor = 1e6;
};

/// ||r||^2 / M.
template <typename Scalar>
double estimate_sigma2_residual(const VecX<Scalar>& r) {
    if (r.size() < 1) throw std::invalid_argument("estimate_sigma2_residual: empty residual");
    return r.squaredNorm() / static_cast<double>(r.size());
}

namespace detail {
template <typename Scalar>
Scalar scalar_mean(const EffectivePrior& ep) {
    if constexpr (std::is_same_v<Scalar, double>)
        return ep.mean_real();
    else
        return ep.mean();
}
}  // namespace detail

/// x_hat = E[X], r = y, gamma_1^2 = N0 + beta Var[X].
template <typename Scalar>
AmpState<Scalar> cbamp_init(const VecX<Scalar>& y, int n, const EffectivePrior& ep, double n0,
                            double beta) {
    if (n0 < 0.0) throw std::invalid_argument("cbamp_init: n0 must be >= 0");
    if (!(beta > 0.0)) throw std::invalid_argument("cbamp_init: beta must be > 0");
    if (n < 1 || y.size() < 1) throw std::invalid_argument("cbamp_init: empty system");
    const double g1 = n0 + beta * ep.variance();
    if (!(g1 > 0.0))
        throw std::invalid_argument("cbamp_init: degenerate start, n0 + beta Var[X] must be > 0");
    AmpState<Scalar> st;
    st.x_hat = VecX<Scalar>::Constant(n, detail::scalar_mean<Scalar>(ep));
    st.r = y;
    st.gamma2 = g1;
    st.z_gamma2 = g1;
    st.t = 1;
    return st;
}

/// One iteration: z = x_hat + H^H r, then the x_hat / gamma^2 / residual
/// updates with the Onsager correction beta (r/gamma^2) <G>. Returns the
/// iteration's <G(z, gamma^2)>.
template <typename Scalar>
double cbamp_step(AmpState<Scalar>& st, const MatX<Scalar>& H, const VecX<Scalar>& y,
                  const Denoiser<Scalar>& d, double n0, double beta, double damping = 0.0) {
    const auto n = H.cols();
    const auto m = H.rows();
    if (st.x_hat.size() != n || st.r.size() != m || y.size() != m)
        throw std::invalid_argument("cbamp_step: shape mismatch");
    const double gamma_old = st.gamma2;

    st.z = st.x_hat + H.adjoint() * st.r;
    st.z_gamma2 = gamma_old;

    VecX<Scalar> x_new(n);
    double g_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const MeanVar<Scalar> mv = d.eval(st.z(i), gamma_old);
        x_new(i) = mv.mean;
        g_sum += mv.var;
    }
    const double g_mean = g_sum / static_cast<double>(n);

    if (damping > 0.0) x_new = (1.0 - damping) * x_new + damping * st.x_hat;
    double gamma_new = n0 + beta * g_mean;
    if (damping > 0.0) gamma_new = (1.0 - damping) * gamma_new + damping * gamma_old;

    st.r = y - H * x_new + (beta * g_mean / gamma_old) * st.r;
    st.x_hat = std::move(x_new);
    st.gamma2 = gamma_new;
    st.t += 1;
    return g_mean;
}

/// Runs cB-AMP until t_max or until the relative change of gamma^2 drops
/// below stop_tol. Returns the last Gaussian output z paired with the
/// threshold at which it was formed.
template <typename Scalar>
DecoupledOutput<Scalar> cbamp_run(const MatX<Scalar>& H, const VecX<Scalar>& y,
                                  const Denoiser<Scalar>& d, const EffectivePrior& ep, double n0,
                                  const AmpOptions& opt = {}) {
    if (opt.t_max < 1) throw std::invalid_argument("cbamp_run: t_max must be >= 1");
    const auto n = H.cols();
    const auto m = H.rows();
    const double beta = static_cast<double>(n) / static_cast<double>(m);
    AmpState<Scalar> st = cbamp_init<Scalar>(y, static_cast<int>(n), ep, n0, beta);
    const double gamma_init = st.gamma2;

    DecoupledOutput<Scalar> out;
    for (int t = 1; t <= opt.t_max; ++t) {
        const double gamma_old = st.gamma2;
        const double res_energy = estimate_sigma2_residual<Scalar>(st.r);
        const double g_mean = cbamp_step(st, H, y, d, n0, beta, opt.damping);
        out.trace.push_back({gamma_old, g_mean, res_energy});
        out.iterations = t;
        if (!std::isfinite(st.gamma2) || !st.x_hat.allFinite() || !st.r.allFinite() ||
            st.gamma2 > opt.divergence_factor * gamma_init)
            throw DivergenceError("cbamp_run: iteration diverged", out.trace);
        if (std::fabs(st.gamma2 - gamma_old) <= opt.stop_tol * gamma_old) break;
    }
    out.z = std::move(st.z);
    out.sigma2_hat = st.z_gamma2;
    return out;
}

}  // namespace ampi
