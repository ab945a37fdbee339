#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "ampi/constellation.hpp"
#include "ampi/priors.hpp"

namespace ampi {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Generators. All are pure functions of (arguments, seed).

/// M x N matrix with i.i.d. CN(0, 1/m) entries (uniform linear measurements).
MatrixXcd gen_channel(int m, int n, std::uint64_t seed);
/// Real counterpart with N(0, 1/m) entries.
MatrixXd gen_channel_real(int m, int n, std::uint64_t seed);

/// i.i.d. draws from a constellation prior.
VectorXcd gen_symbols(const Constellation& c, int n, std::uint64_t seed);
/// Bernoulli-Gaussian: nonzero w.p. kappa, nonzeros ~ N(0,1).
VectorXd gen_bernoulli_gaussian(double kappa, int n, std::uint64_t seed);

/// x = s + e with e i.i.d. CN(0, nt) / N(0, nt).
VectorXcd apply_input_noise(const VectorXcd& s, double nt, std::uint64_t seed);
VectorXd apply_input_noise(const VectorXd& s, double nt, std::uint64_t seed);

struct MeasurementC {
    VectorXcd y, n;
};
struct MeasurementR {
    VectorXd y, n;
};
/// y = H x + n with per-entry noise variance n0.
MeasurementC measure(const MatrixXcd& H, const VectorXcd& x, double n0, std::uint64_t seed);
MeasurementR measure(const MatrixXd& H, const VectorXd& x, double n0, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics.

/// Fraction of entries that differ (exact symbol comparison).
double ser(const VectorXcd& s_hat, const VectorXcd& s);

/// 10 log10(||s||^2 / ||s_hat - s||^2); +inf when s_hat == s.
double rsnr_db(const VectorXd& s_hat, const VectorXd& s);
double rsnr_db(const VectorXcd& s_hat, const VectorXcd& s);

/// Average receive SNR beta * Es / N0, in dB.
double snr_db(double beta, double es, double n0);
double n0_from_snr_db(double snr_db, double beta, double es);
/// EVM = NT / Es in dB.
double evm_db(double nt, double es);
double nt_from_evm_db(double evm_db, double es);

// ---------------------------------------------------------------------------
// One simulated realization of y = H x + n.

template <typename MatT, typename VecT>
struct SystemInstance {
    MatT H;
    VecT s, x, n, y;
    double beta = 0.0;
    double n0 = 0.0;
    double nt = 0.0;
};

using MimoInstance = SystemInstance<MatrixXcd, VectorXcd>;
using CsInstance = SystemInstance<MatrixXd, VectorXd>;

/// QPSK-style MIMO realization; per-purpose RNG streams are derived from
/// (seed, trial), so trials are independent and order-insensitive.
MimoInstance make_mimo_instance(int n, int m, const Constellation& c, double n0, double nt,
                                std::uint64_t seed, std::uint64_t trial);

/// Sparse real realization with a Bernoulli-Gaussian signal.
CsInstance make_cs_instance(int n, int m, double kappa, double n0, double nt, std::uint64_t seed,
                            std::uint64_t trial);

}  // namespace ampi
