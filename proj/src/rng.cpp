#include "spotsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spotsim {

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    // Rejection above the largest multiple of n to stay unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n) - 1;
    std::uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return v % n;
}

double Rng::normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

namespace {

// Knuth's product-of-uniforms method, O(mean) draws.
std::int64_t poisson_small(double mean, Rng& rng) {
    const double limit = std::exp(-mean);
    std::int64_t k = -1;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform01();
    } while (p > limit);
    return k;
}

// Transformed rejection with decomposition (Hormann 1993), exact for mean >= 10.
std::int64_t poisson_ptrd(double mean, Rng& rng) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);

    for (;;) {
        double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + k * log_mu - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

}  // namespace

std::int64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be non-negative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_small(mean, *this);
    return poisson_ptrd(mean, *this);
}

}  // namespace spotsim
