#include "ampi/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace ampi {

Constellation Constellation::bpsk() {
    return {{{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5}};
}

Constellation Constellation::qpsk() {
    const double a = 1.0 / std::sqrt(2.0);
    return {{{a, a}, {a, -a}, {-a, a}, {-a, -a}}, std::vector<double>(4, 0.25)};
}

Constellation Constellation::qam16() {
    const double s = 1.0 / std::sqrt(10.0);
    Constellation c;
    for (int i : {-3, -1, 1, 3})
        for (int q : {-3, -1, 1, 3}) c.points.emplace_back(i * s, q * s);
    c.probs.assign(16, 1.0 / 16.0);
    return c;
}

Constellation Constellation::single_point(std::complex<double> a) {
    return {{a}, {1.0}};
}

Constellation Constellation::by_name(const std::string& name) {
    if (name == "bpsk") return bpsk();
    if (name == "qpsk") return qpsk();
    if (name == "16qam" || name == "qam16") return qam16();
    throw std::invalid_argument("unknown constellation: " + name);
}

std::complex<double> Constellation::mean() const {
    std::complex<double> m = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) m += probs[i] * points[i];
    return m;
}

double Constellation::energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) e += probs[i] * std::norm(points[i]);
    return e;
}

double Constellation::variance() const { return energy() - std::norm(mean()); }

bool Constellation::is_real() const {
    for (const auto& p : points)
        if (p.imag() != 0.0) return false;
    return true;
}

void Constellation::validate() const {
    if (points.empty()) throw std::invalid_argument("constellation: empty point set");
    if (points.size() != probs.size())
        throw std::invalid_argument("constellation: points/probs size mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("constellation: negative probability");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("constellation: probabilities do not sum to 1");
}

}  // namespace ampi
