#pragma once

// Euclidean gamma matrices in a chiral basis. Every entry is 0, +-1 or +-i,
// so the Clifford relations hold exactly in floating point:
//   gamma_d^dag = gamma_d,  gamma_d^2 = I,
//   gamma_d gamma_e + gamma_e gamma_d = 0  (d != e),
//   gamma5 = gamma_x gamma_y gamma_z gamma_t = diag(1, 1, -1, -1).

#include "qiral/cmat.hpp"

namespace qiral {

namespace detail {

inline Mat4 make_gamma(int axis) {
    const std::complex<double> i(0.0, 1.0);
    Mat4 g;
    switch (axis) {
    case 0: // x
        g(0, 3) = -i; g(1, 2) = -i; g(2, 1) = i; g(3, 0) = i;
        break;
    case 1: // y
        g(0, 3) = -1.0; g(1, 2) = 1.0; g(2, 1) = 1.0; g(3, 0) = -1.0;
        break;
    case 2: // z
        g(0, 2) = -i; g(1, 3) = i; g(2, 0) = i; g(3, 1) = -i;
        break;
    case 3: // t
        g(0, 2) = 1.0; g(1, 3) = 1.0; g(2, 0) = 1.0; g(3, 1) = 1.0;
        break;
    }
    return g;
}

} // namespace detail

inline const Mat4& gamma_mat(int axis) {
    static const Mat4 g[4] = {detail::make_gamma(0), detail::make_gamma(1),
                              detail::make_gamma(2), detail::make_gamma(3)};
    return g[axis];
}

inline const Mat4& gamma5_mat() {
    static const Mat4 g5 = [] {
        Mat4 m;
        m(0, 0) = 1.0; m(1, 1) = 1.0; m(2, 2) = -1.0; m(3, 3) = -1.0;
        return m;
    }();
    return g5;
}

inline const Mat4& spin_ident() {
    static const Mat4 id = Mat4::ident();
    return id;
}

// I + gamma_d (sign > 0) or I - gamma_d (sign < 0), the spin projectors of
// the hopping terms up to a factor of 2.
inline Mat4 hop_spin_mat(int axis, int sign) {
    return sign > 0 ? spin_ident() + gamma_mat(axis) : spin_ident() - gamma_mat(axis);
}

} // namespace qiral
