#include "ampi/baselines.hpp"

#include <cmath>

#include "ampi/denoiser.hpp"

namespace ampi {

namespace {

// Q^{-1/2} by Hermitian eigendecomposition with an eigenvalue floor; Q is
// at least N0 I, so the floor is a safety net only.
template <typename MatT>
MatT inv_sqrt_hermitian(const MatT& Q) {
    Eigen::SelfAdjointEigenSolver<MatT> es(Q);
    if (es.info() != Eigen::Success)
        throw NumericalError("whiten: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    const double floor = 1e-12 * ev.maxCoeff();
    if (ev.minCoeff() < -floor) throw NumericalError("whiten: Q numerically indefinite");
    Eigen::VectorXd inv_sqrt(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        inv_sqrt(i) = 1.0 / std::sqrt(std::max(ev(i), floor));
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
}

template <typename MatT, typename VecT>
WhitenedSystem<MatT, VecT> whiten_impl(const MatT& H, const VecT& y, double nt, double n0) {
    if (!(n0 > 0.0)) throw std::invalid_argument("whiten: n0 must be > 0");
    if (nt < 0.0) throw std::invalid_argument("whiten: nt must be >= 0");
    if (H.rows() != y.size()) throw std::invalid_argument("whiten: shape mismatch");
    if (nt == 0.0) return {H, y, n0};  // Q = n0 I exactly; W = I
    MatT Q = nt * (H * H.adjoint());
    Q += n0 * MatT::Identity(H.rows(), H.rows());
    const MatT W = std::sqrt(n0) * inv_sqrt_hermitian(Q);
    return {W * H, W * y, n0};
}

}  // namespace

WhitenedC whiten(const MatrixXcd& H, const VectorXcd& y, double nt, double n0) {
    return whiten_impl(H, y, nt, n0);
}

WhitenedR whiten(const MatrixXd& H, const VectorXd& y, double nt, double n0) {
    return whiten_impl(H, y, nt, n0);
}

VectorXcd whitened_amp_run(const WhitenedC& ws, const Constellation& c, const AmpOptions& opt) {
    const MimoResult res = ampi_map_run(ws.H_tilde, ws.y_tilde, c, 0.0, ws.effective_n0, opt);
    return res.s_hat;
}

VectorXd whitened_amp_run(const WhitenedR& ws, const SureOptions& opt) {
    const CsResult res = ampi_sure_run(ws.H_tilde, ws.y_tilde, 0.0, opt);
    return res.s_hat;
}

// ---------------------------------------------------------------------------

double objective_q(const VectorXd& x, const VectorXd& y, const MatrixXd& H, double n0,
                   double lambda, double nt) {
    if (!(n0 > 0.0)) throw std::invalid_argument("objective_q: n0 must be > 0");
    const EffectivePrior ep(LaplacePrior{lambda}, InputNoiseModel{nt}, Field::real);
    double logp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) logp += ep.log_density(x(i));
    return (y - H * x).squaredNorm() / (2.0 * n0) - logp;
}

VectorXd grad_q(const VectorXd& x, const VectorXd& y, const MatrixXd& H, double n0, double lambda,
                double nt) {
    if (!(n0 > 0.0)) throw std::invalid_argument("grad_q: n0 must be > 0");
    VectorXd g = H.transpose() * (H * x - y) / n0;
    // d/dx_i log p(x_i) = lambda * eta(x_i, tau = 0): only NT enters.
    for (Eigen::Index i = 0; i < x.size(); ++i) g(i) -= lambda * laplace_eta(x(i), nt, lambda);
    return g;
}

NcgResult ncg_solve(const VectorXd& y, const MatrixXd& H, double n0, double lambda, double nt,
                    const NcgOptions& opt) {
    const Eigen::Index n = H.cols();
    NcgResult res;
    VectorXd x = VectorXd::Zero(n);
    VectorXd g = grad_q(x, y, H, n0, lambda, nt);
    VectorXd dir = -g;
    double q = objective_q(x, y, H, n0, lambda, nt);
    res.objective.push_back(q);
    double step = 1.0 / (1.0 + g.norm());
    double slope_prev = g.dot(dir);

    for (int it = 0; it < opt.max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        double slope = g.dot(dir);
        if (slope >= 0.0) {  // not a descent direction; restart on steepest
            dir = -g;
            slope = g.dot(dir);
        }
        // Quadratic-fit initial step from the previous accepted move.
        double alpha = it == 0 ? step : step * std::min(10.0, std::max(0.1, slope_prev / slope));
        bool accepted = false;
        for (int h = 0; h < opt.max_halvings; ++h) {
            const VectorXd x_try = x + alpha * dir;
            const double q_try = objective_q(x_try, y, H, n0, lambda, nt);
            if (q_try <= q + opt.armijo_c * alpha * slope) {
                x = x_try;
                q = q_try;
                accepted = true;
                break;
            }
            alpha *= opt.armijo_shrink;
        }
        if (!accepted) {
            res.x_hat = x;
            throw NumericalError("ncg_solve: line search failed after max halvings");
        }
        step = alpha;
        slope_prev = slope;
        res.objective.push_back(q);
        res.iterations = it + 1;

        const VectorXd g_new = grad_q(x, y, H, n0, lambda, nt);
        const double beta_pr = g_new.dot(g_new - g) / g.squaredNorm();
        g = g_new;
        if (beta_pr <= 0.0)
            dir = -g;  // Polak-Ribiere restart
        else
            dir = -g + beta_pr * dir;
    }
    if (!res.converged && g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) res.converged = true;

    res.x_hat = x;
    if (opt.map_to_signal) {
        // s_hat_i = E[S | x_i = x_hat_i]: the x_hat is treated as a
        // noiseless observation of x = s + e.
        res.s_hat.resize(n);
        if (nt > 0.0)
            for (Eigen::Index i = 0; i < n; ++i)
                res.s_hat(i) = laplace_gauss_F(x(i), nt, lambda, 0.0);
        else
            res.s_hat = x;
    } else {
        res.s_hat = x;
    }
    return res;
}

// ---------------------------------------------------------------------------

VectorXd oracle_ls(const VectorXd& y, const MatrixXd& H, const std::vector<int>& support) {
    VectorXd x = VectorXd::Zero(H.cols());
    if (support.empty()) return x;
    if (static_cast<Eigen::Index>(support.size()) > H.rows())
        throw std::invalid_argument("oracle_ls: support larger than measurement count");
    MatrixXd Hs(H.rows(), support.size());
    for (std::size_t j = 0; j < support.size(); ++j) {
        if (support[j] < 0 || support[j] >= H.cols())
            throw std::invalid_argument("oracle_ls: support index out of range");
        Hs.col(j) = H.col(support[j]);
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Hs);
    if (cod.rank() < static_cast<Eigen::Index>(support.size()))
        throw NumericalError("oracle_ls: support columns are rank deficient");
    const VectorXd xs = cod.solve(y);  // minimum-norm least squares
    for (std::size_t j = 0; j < support.size(); ++j) x(support[j]) = xs(j);
    return x;
}

}  // namespace ampi
