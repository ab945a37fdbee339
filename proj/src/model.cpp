#include "ampi/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ampi/rng.hpp"

namespace ampi {

MatrixXcd gen_channel(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("gen_channel: dimensions must be >= 1");
    auto gen = rng::make_stream(seed, 0, "channel");
    MatrixXcd H(m, n);
    const double v = 1.0 / m;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) H(i, j) = rng::complex_gaussian(gen, v);
    return H;
}

MatrixXd gen_channel_real(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("gen_channel: dimensions must be >= 1");
    auto gen = rng::make_stream(seed, 0, "channel");
    MatrixXd H(m, n);
    const double v = 1.0 / m;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) H(i, j) = rng::gaussian(gen, v);
    return H;
}

VectorXcd gen_symbols(const Constellation& c, int n, std::uint64_t seed) {
    c.validate();
    auto gen = rng::make_stream(seed, 0, "signal");
    std::discrete_distribution<int> pick(c.probs.begin(), c.probs.end());
    VectorXcd s(n);
    for (int i = 0; i < n; ++i) s(i) = c.points[pick(gen)];
    return s;
}

VectorXd gen_bernoulli_gaussian(double kappa, int n, std::uint64_t seed) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("gen_bernoulli_gaussian: kappa must be in [0,1]");
    auto gen = rng::make_stream(seed, 0, "signal");
    std::bernoulli_distribution on(kappa);
    VectorXd s = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (kappa > 0.0 && on(gen)) s(i) = rng::gaussian(gen, 1.0);
    return s;
}

VectorXcd apply_input_noise(const VectorXcd& s, double nt, std::uint64_t seed) {
    if (nt < 0.0) throw std::invalid_argument("apply_input_noise: nt must be >= 0");
    auto gen = rng::make_stream(seed, 0, "input-noise");
    VectorXcd x = s;
    if (nt > 0.0)
        for (int i = 0; i < s.size(); ++i) x(i) += rng::complex_gaussian(gen, nt);
    return x;
}

VectorXd apply_input_noise(const VectorXd& s, double nt, std::uint64_t seed) {
    if (nt < 0.0) throw std::invalid_argument("apply_input_noise: nt must be >= 0");
    auto gen = rng::make_stream(seed, 0, "input-noise");
    VectorXd x = s;
    if (nt > 0.0)
        for (int i = 0; i < s.size(); ++i) x(i) += rng::gaussian(gen, nt);
    return x;
}

MeasurementC measure(const MatrixXcd& H, const VectorXcd& x, double n0, std::uint64_t seed) {
    if (H.cols() != x.size()) throw std::invalid_argument("measure: shape mismatch");
    if (n0 < 0.0) throw std::invalid_argument("measure: n0 must be >= 0");
    auto gen = rng::make_stream(seed, 0, "measurement-noise");
    VectorXcd n(H.rows());
    for (int i = 0; i < n.size(); ++i) n(i) = rng::complex_gaussian(gen, n0);
    return {H * x + n, n};
}

MeasurementR measure(const MatrixXd& H, const VectorXd& x, double n0, std::uint64_t seed) {
    if (H.cols() != x.size()) throw std::invalid_argument("measure: shape mismatch");
    if (n0 < 0.0) throw std::invalid_argument("measure: n0 must be >= 0");
    auto gen = rng::make_stream(seed, 0, "measurement-noise");
    VectorXd n(H.rows());
    for (int i = 0; i < n.size(); ++i) n(i) = rng::gaussian(gen, n0);
    return {H * x + n, n};
}

double ser(const VectorXcd& s_hat, const VectorXcd& s) {
    if (s_hat.size() != s.size()) throw std::invalid_argument("ser: length mismatch");
    int errors = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s_hat(i) != s(i)) ++errors;
    return static_cast<double>(errors) / static_cast<double>(s.size());
}

namespace {
template <typename VecT>
double rsnr_db_impl(const VecT& s_hat, const VecT& s) {
    if (s_hat.size() != s.size()) throw std::invalid_argument("rsnr_db: length mismatch");
    const double num = s.squaredNorm();
    if (num == 0.0) throw std::invalid_argument("rsnr_db: reference signal is all-zero");
    const double den = (s_hat - s).squaredNorm();
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}
}  // namespace

double rsnr_db(const VectorXd& s_hat, const VectorXd& s) { return rsnr_db_impl(s_hat, s); }
double rsnr_db(const VectorXcd& s_hat, const VectorXcd& s) { return rsnr_db_impl(s_hat, s); }

double snr_db(double beta, double es, double n0) { return 10.0 * std::log10(beta * es / n0); }

double n0_from_snr_db(double snr_db, double beta, double es) {
    return beta * es / std::pow(10.0, snr_db / 10.0);
}

double evm_db(double nt, double es) { return 10.0 * std::log10(nt / es); }

double nt_from_evm_db(double evm_db, double es) { return es * std::pow(10.0, evm_db / 10.0); }

MimoInstance make_mimo_instance(int n, int m, const Constellation& c, double n0, double nt,
                                std::uint64_t seed, std::uint64_t trial) {
    MimoInstance inst;
    inst.beta = static_cast<double>(n) / m;
    inst.n0 = n0;
    inst.nt = nt;
    inst.H = gen_channel(m, n, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 0)));
    inst.s = gen_symbols(c, n, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 1)));
    inst.x = apply_input_noise(inst.s, nt, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 2)));
    auto meas = measure(inst.H, inst.x, n0, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 3)));
    inst.y = std::move(meas.y);
    inst.n = std::move(meas.n);
    return inst;
}

CsInstance make_cs_instance(int n, int m, double kappa, double n0, double nt, std::uint64_t seed,
                            std::uint64_t trial) {
    CsInstance inst;
    inst.beta = static_cast<double>(n) / m;
    inst.n0 = n0;
    inst.nt = nt;
    inst.H = gen_channel_real(m, n, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 0)));
    inst.s = gen_bernoulli_gaussian(kappa, n, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 1)));
    inst.x = apply_input_noise(inst.s, nt, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 2)));
    auto meas = measure(inst.H, inst.x, n0, rng::splitmix64(seed ^ rng::splitmix64(trial * 4 + 3)));
    inst.y = std::move(meas.y);
    inst.n = std::move(meas.n);
    return inst;
}

}  // namespace ampi
