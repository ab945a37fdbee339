#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace ampi::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag);

/// Independent generator keyed by (master seed, stream index, purpose tag).
/// Every trial and purpose gets its own stream, so results do not depend on
/// scheduling when trials run concurrently.
std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream, std::string_view purpose);

/// N(0, variance) sample.
double gaussian(std::mt19937_64& gen, double variance);

/// Circularly-symmetric CN(0, variance): independent real/imag parts,
/// each N(0, variance/2).
std::complex<double> complex_gaussian(std::mt19937_64& gen, double variance);

}  // namespace ampi::rng
