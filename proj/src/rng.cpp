#include "ampi/rng.hpp"

namespace ampi::rng {

std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream, std::string_view purpose) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(stream));
    s = splitmix64(s ^ hash_tag(purpose));
    return std::mt19937_64(s);
}

double gaussian(std::mt19937_64& gen, double variance) {
    if (variance <= 0.0) return 0.0;
    std::normal_distribution<double> d(0.0, std::sqrt(variance));
    return d(gen);
}

std::complex<double> complex_gaussian(std::mt19937_64& gen, double variance) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> d(0.0, std::sqrt(0.5 * variance));
    const double re = d(gen);
    const double im = d(gen);
    return {re, im};
}

}  // namespace ampi::rng
