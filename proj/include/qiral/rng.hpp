#pragma once

// Deterministic random sources. std::mt19937_64 has a pinned algorithm, but
// std::normal_distribution does not, so gaussians go through an explicit
// Box-Muller transform to make streams reproducible across standard
// libraries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qiral {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::complex<double> cgaussian() {
        double re = gaussian();
        double im = gaussian();
        return {re, im};
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection keeps the distribution exact and the stream deterministic.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % n;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qiral
