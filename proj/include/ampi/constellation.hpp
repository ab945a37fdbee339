#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ampi {

/// Finite symbol alphabet with prior probabilities. Built-in presets are
/// normalized to unit average symbol energy.
struct Constellation {
    std::vector<std::complex<double>> points;
    std::vector<double> probs;

    static Constellation bpsk();
    static Constellation qpsk();
    static Constellation qam16();
    static Constellation single_point(std::complex<double> a);
    static Constellation by_name(const std::string& name);  // "bpsk" | "qpsk" | "16qam"

    std::size_t size() const { return points.size(); }
    std::complex<double> mean() const;
    double energy() const;    // sum_a p_a |a|^2
    double variance() const;  // energy - |mean|^2
    bool is_real() const;     // all points on the real axis

    /// Throws std::invalid_argument on empty sets, size mismatch, negative
    /// probabilities, or probabilities not summing to 1 within 1e-12.
    void validate() const;
};

}  // namespace ampi
