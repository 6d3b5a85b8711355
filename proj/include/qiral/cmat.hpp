#pragma once

// Fixed-size dense complex matrices for the two internal spaces (3 colors,
// 4 spin components). Everything is by-value; sizes are tiny.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qiral {

template <std::size_t N>
struct CMat {
    std::array<std::complex<double>, N * N> a{};

    std::complex<double>& operator()(std::size_t r, std::size_t c) { return a[r * N + c]; }
    const std::complex<double>& operator()(std::size_t r, std::size_t c) const { return a[r * N + c]; }

    static CMat zero() { return CMat{}; }
    static CMat ident() {
        CMat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    CMat operator+(const CMat& o) const {
        CMat r;
        for (std::size_t i = 0; i < N * N; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    CMat operator-(const CMat& o) const {
        CMat r;
        for (std::size_t i = 0; i < N * N; ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    CMat operator*(const CMat& o) const {
        CMat r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                auto v = (*this)(i, k);
                if (v == std::complex<double>(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < N; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }
    CMat operator*(std::complex<double> s) const {
        CMat r;
        for (std::size_t i = 0; i < N * N; ++i) r.a[i] = a[i] * s;
        return r;
    }

    CMat dagger() const {
        CMat r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }
    CMat transpose() const {
        CMat r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    bool operator==(const CMat& o) const { return a == o.a; }

    double max_abs_diff(const CMat& o) const {
        double m = 0.0;
        for (std::size_t i = 0; i < N * N; ++i) m = std::max(m, std::abs(a[i] - o.a[i]));
        return m;
    }

    std::complex<double> det() const {
        static_assert(N <= 3, "det only provided for tiny matrices");
        if constexpr (N == 1) return a[0];
        if constexpr (N == 2) return a[0] * a[3] - a[1] * a[2];
        if constexpr (N == 3) {
            const auto& m = *this;
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        }
    }
};

using Mat3 = CMat<3>;
using Mat4 = CMat<4>;

} // namespace qiral
