#include "gmreg/rng.hpp"

#include "gmreg/errors.hpp"

#include <cmath>
#include <random>

namespace gmreg {
namespace {

// Top 53 bits of a 64-bit draw mapped to [0, 1); the usual way to get a
// dyadic uniform that behaves identically everywhere.
double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

Vector gaussian_vector(Index len, double sigma, std::uint64_t seed) {
    if (len < 0) throw DomainError("gaussian_vector: negative length");
    if (sigma < 0) throw DomainError("gaussian_vector: negative sigma");

    std::mt19937_64 gen(seed);
    Vector v(len);
    // Box-Muller, spelled out rather than std::normal_distribution so the
    // stream does not depend on the standard library implementation.
    Index i = 0;
    while (i < len) {
        double u1 = unit_uniform(gen);
        while (u1 == 0.0) u1 = unit_uniform(gen);
        const double u2 = unit_uniform(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        v(i++) = sigma * r * std::cos(a);
        if (i < len) v(i++) = sigma * r * std::sin(a);
    }
    return v;
}

Vector uniform_vector(Index len, double lo, double hi, std::uint64_t seed) {
    if (len < 0) throw DomainError("uniform_vector: negative length");
    if (!(lo < hi)) throw DomainError("uniform_vector: need lo < hi");
    std::mt19937_64 gen(seed);
    Vector v(len);
    for (Index i = 0; i < len; ++i) v(i) = lo + (hi - lo) * unit_uniform(gen);
    return v;
}

}  // namespace gmreg
