#pragma once

// The twisted-mass Wilson Dirac operator, in two independent forms:
//
//  1. dirac_term: the structural term
//       I + 2 i kappa mu (I (x) gamma5)
//         + kappa sum_d ((Shift(L,-d) (x) I_C) . (+)_{s in L} U(d)[s]) (x) (I_S + gamma_d)
//         + kappa sum_d ((Shift(L, d) (x) I_C) . (+)_{s in L} U(-d)[s]) (x) (I_S - gamma_d)
//     with the conventions Shift(L,d) v [s] = v[s + d] and
//     U(-d)[s] = U(d)[s - d]^dag.
//
//  2. dense_dirac_stencil / apply_dirac_stencil: the per-site action
//       (D psi)[s] = psi[s] + 2 i kappa mu (1 (x) gamma5) psi[s]
//         + kappa sum_d U(d)[s-d] (x) (1 + gamma_d) psi[s-d]
//         + kappa sum_d U(d)[s]^dag (x) (1 - gamma_d) psi[s+d]
//     written directly against the gauge field, with no term machinery at
//     all. Agreement of the two is the ground anchor of the whole pipeline.
//
// Element layout everywhere: elem = (site * 3 + color) * 4 + spin.

#include <complex>
#include <vector>

#include "qiral/dense.hpp"
#include "qiral/gamma.hpp"
#include "qiral/gauge.hpp"
#include "qiral/lattice.hpp"
#include "qiral/term.hpp"

namespace qiral {

inline IndexSetPtr full_space(const IndexSetPtr& L) {
    return IndexSet::product({L, color_set(), spin_set()});
}

inline TermPtr dirac_term(const IndexSetPtr& L) {
    const auto& C = color_set();
    const auto& S = spin_set();
    Dir d = Dir::of_var("d");

    TermPtr unit = t_identity(full_space(L));
    TermPtr twist = t_scalar_mul(
        t_mul({t_lit(2.0), t_imag(), t_scalar("kappa"), t_scalar("mu")}),
        t_tensor(t_identity(IndexSet::product({L, C})), t_gamma5()));

    auto hop = [&](Dir shift_dir, Dir link_dir, TermPtr spin) {
        TermPtr site_links = t_dsum("s", L, t_link(link_dir, "s"));
        TermPtr move = t_mul(t_tensor(t_shift(L, shift_dir), t_identity(C)), site_links);
        return t_tensor(move, spin);
    };

    TermPtr fwd = t_isum("d", IndexSet::direction(),
                         hop(d.negated(), d, t_add(t_identity(S), t_gamma(d))));
    TermPtr bwd = t_isum("d", IndexSet::direction(),
                         hop(d, d.negated(), t_sub(t_identity(S), t_gamma(d))));

    return t_add({unit, twist,
                  t_scalar_mul(t_scalar("kappa"), fwd),
                  t_scalar_mul(t_scalar("kappa"), bwd)});
}

// M[(s,a,alpha), (s',b,beta)] assembled row by row from the per-site action.
inline Dense dense_dirac_stencil(const LatticeGeom& g, const GaugeField& u, double kappa,
                                 double mu) {
    const long vol = g.volume();
    const long n = vol * 12;
    Dense m(n, n);
    const Complex tw = Complex(0.0, 2.0 * kappa * mu);
    for (long s = 0; s < vol; ++s) {
        for (int a = 0; a < 3; ++a)
            for (int al = 0; al < 4; ++al) {
                long row = (s * 3 + a) * 4 + al;
                m(row, row) += 1.0;
                m(row, (s * 3 + a) * 4 + al) += tw * gamma5_mat()(al, al);
            }
        for (int axis = 0; axis < 4; ++axis) {
            long back = g.neighbor(s, axis, -1);
            long fwd = g.neighbor(s, axis, +1);
            Mat3 ub = u.link(back, axis);
            Mat3 uf = u.link(s, axis).dagger();
            Mat4 plus = hop_spin_mat(axis, +1);
            Mat4 minus = hop_spin_mat(axis, -1);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int al = 0; al < 4; ++al)
                        for (int be = 0; be < 4; ++be) {
                            Complex cb = kappa * ub(a, b) * plus(al, be);
                            if (cb != Complex(0.0, 0.0))
                                m((s * 3 + a) * 4 + al, (back * 3 + b) * 4 + be) += cb;
                            Complex cf = kappa * uf(a, b) * minus(al, be);
                            if (cf != Complex(0.0, 0.0))
                                m((s * 3 + a) * 4 + al, (fwd * 3 + b) * 4 + be) += cf;
                        }
        }
    }
    return m;
}

// Matrix-free application of the same action.
inline void apply_dirac_stencil(const LatticeGeom& g, const GaugeField& u, double kappa,
                                double mu, const std::vector<Complex>& in,
                                std::vector<Complex>& out) {
    const long vol = g.volume();
    out.assign(size_t(vol) * 12, Complex(0.0, 0.0));
    const Complex tw = Complex(0.0, 2.0 * kappa * mu);
    for (long s = 0; s < vol; ++s) {
        const Complex* ps = &in[size_t(s) * 12];
        Complex* os = &out[size_t(s) * 12];
        for (int a = 0; a < 3; ++a)
            for (int al = 0; al < 4; ++al)
                os[a * 4 + al] += ps[a * 4 + al] + tw * gamma5_mat()(al, al) * ps[a * 4 + al];
        for (int axis = 0; axis < 4; ++axis) {
            long back = g.neighbor(s, axis, -1);
            long fwd = g.neighbor(s, axis, +1);
            const Mat3 ub = u.link(back, axis);
            const Mat3 uf = u.link(s, axis).dagger();
            const Mat4 plus = hop_spin_mat(axis, +1);
            const Mat4 minus = hop_spin_mat(axis, -1);
            const Complex* pb = &in[size_t(back) * 12];
            const Complex* pf = &in[size_t(fwd) * 12];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int al = 0; al < 4; ++al)
                        for (int be = 0; be < 4; ++be) {
                            os[a * 4 + al] += kappa * ub(a, b) * plus(al, be) * pb[b * 4 + be];
                            os[a * 4 + al] += kappa * uf(a, b) * minus(al, be) * pf[b * 4 + be];
                        }
        }
    }
}

} // namespace qiral
