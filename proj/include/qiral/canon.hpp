#pragma once
// Canonical form for engine terms plus a small scalar-polynomial expander
// used to decide rule conditions symbolically.
//
// canon() is idempotent and establishes, for any well-shaped input:
//   - no ImagUnit node (folded into a complex literal)
//   - no Neg node (folded into a -1 scalar factor)
//   - Mul operands are all non-scalar; scalar factors are hoisted into a
//     single ScalarMul wrapper whose scalar part carries at most one
//     leading literal (dropped when it is exactly 1)
//   - ScalarMul never nests and never wraps a scalar
//   - dagger/transpose fold through scalars, inner products, gauge-link
//     flags and the two binders; matrix-level dagger laws stay rewrite
//     rules so their patterns survive canonicalization
// Literal folding multiplies coefficients in operand order, so two terms
// that canonicalize equal also denote bit-identical values.

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qiral/shape.hpp"
#include "qiral/term.hpp"

namespace qiral {

// ---- index-set lists ----------------------------------------------------

// Flat factor list of a (possibly product) set; products are built
// pre-flattened so one level suffices.
inline std::vector<IndexSetPtr> flat_sets(const IndexSetPtr& s) {
    if (!s) return {};
    if (s->kind == SetKind::Product) return s->factors;
    return {s};
}

inline bool set_list_eq(const std::vector<IndexSetPtr>& a, const std::vector<IndexSetPtr>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!set_eq(a[i], b[i])) return false;
    return true;
}

// ---- scalar polynomials --------------------------------------------------

// Monomial: sorted multiset of scalar symbol names. A polynomial maps
// monomials to complex coefficients; near-zero coefficients are kept so
// equality stays purely structural.
using Monomial = std::vector<std::string>;

struct ScalarPoly {
    std::map<Monomial, Complex> terms;

    static ScalarPoly constant(Complex c) {
        ScalarPoly p;
        if (c != Complex{}) p.terms[{}] = c;
        return p;
    }
    static ScalarPoly symbol(const std::string& n) {
        ScalarPoly p;
        p.terms[{n}] = Complex{1.0, 0.0};
        return p;
    }

    ScalarPoly& operator+=(const ScalarPoly& o) {
        for (const auto& [m, c] : o.terms) {
            auto& v = terms[m];
            v += c;
            if (v == Complex{}) terms.erase(m);
        }
        return *this;
    }
    ScalarPoly& operator-=(const ScalarPoly& o) {
        for (const auto& [m, c] : o.terms) {
            auto& v = terms[m];
            v -= c;
            if (v == Complex{}) terms.erase(m);
        }
        return *this;
    }
    friend ScalarPoly operator*(const ScalarPoly& a, const ScalarPoly& b) {
        ScalarPoly r;
        for (const auto& [ma, ca] : a.terms)
            for (const auto& [mb, cb] : b.terms) {
                Monomial m = ma;
                m.insert(m.end(), mb.begin(), mb.end());
                std::sort(m.begin(), m.end());
                auto& v = r.terms[m];
                v += ca * cb;
                if (v == Complex{}) r.terms.erase(m);
            }
        return r;
    }
    ScalarPoly conj() const {
        ScalarPoly r;
        for (const auto& [m, c] : terms) r.terms[m] = std::conj(c);
        return r;
    }
    bool is_zero() const { return terms.empty(); }
};

// Expands a scalar term into polynomial form; nullopt when the term is not
// polynomial in its symbols (inverse, inner product, pattern variable).
inline std::optional<ScalarPoly> expand_scalar(const TermPtr& t) {
    switch (t->kind) {
    case TermKind::ScalarLit:
        return ScalarPoly::constant(t->lit);
    case TermKind::ImagUnit:
        return ScalarPoly::constant(Complex{0.0, 1.0});
    case TermKind::SymScalar:
        return ScalarPoly::symbol(t->name);
    case TermKind::Neg: {
        auto a = expand_scalar(t->kid(0));
        if (!a) return std::nullopt;
        ScalarPoly r;
        r -= *a;
        return r;
    }
    case TermKind::Dagger: {
        // Scalar parameters are real, so conjugation touches literals only.
        auto a = expand_scalar(t->kid(0));
        if (!a) return std::nullopt;
        return a->conj();
    }
    case TermKind::Add: {
        ScalarPoly r;
        for (const auto& k : t->kids) {
            auto a = expand_scalar(k);
            if (!a) return std::nullopt;
            r += *a;
        }
        return r;
    }
    case TermKind::Sub: {
        auto a = expand_scalar(t->kid(0));
        auto b = expand_scalar(t->kid(1));
        if (!a || !b) return std::nullopt;
        ScalarPoly r = *a;
        r -= *b;
        return r;
    }
    case TermKind::Mul:
    case TermKind::ScalarMul: {
        ScalarPoly r = ScalarPoly::constant(Complex{1.0, 0.0});
        for (const auto& k : t->kids) {
            auto a = expand_scalar(k);
            if (!a) return std::nullopt;
            r = r * *a;
        }
        return r;
    }
    default:
        return std::nullopt;
    }
}

// True when the polynomial is bounded below by a positive constant for all
// real parameter values: positive real constant term plus terms that are
// nonnegative real multiples of even-power monomials.
inline bool structurally_positive(const ScalarPoly& p) {
    bool has_const = false;
    for (const auto& [m, c] : p.terms) {
        if (c.imag() != 0.0) return false;
        if (m.empty()) {
            if (c.real() <= 0.0) return false;
            has_const = true;
            continue;
        }
        if (c.real() < 0.0) return false;
        for (size_t i = 0; i < m.size();) {
            size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            if ((j - i) % 2 != 0) return false;
            i = j;
        }
    }
    return has_const;
}

// Symbolic nonzeroness: sign-definite polynomials and nonzero constants.
inline bool provably_nonzero(const ScalarPoly& p) {
    if (structurally_positive(p)) return true;
    ScalarPoly neg;
    neg -= p;
    if (structurally_positive(neg)) return true;
    if (p.terms.size() == 1) {
        const auto& [m, c] = *p.terms.begin();
        if (m.empty() && c != Complex{}) return true;
    }
    return false;
}

// ---- canonicalization -----------------------------------------------------

class Canonicalizer {
public:
    explicit Canonicalizer(const ShapeEnv& env) : env_(env) {}

    TermPtr run(const TermPtr& t) {
        switch (t->kind) {
        case TermKind::ImagUnit:
            return t_lit(Complex{0.0, 1.0});
        case TermKind::Neg: {
            TermPtr k = run(t->kid(0));
            return assemble({t_lit(Complex{-1.0, 0.0}), k});
        }
        case TermKind::Mul:
        case TermKind::ScalarMul: {
            std::vector<TermPtr> ks;
            ks.reserve(t->kids.size());
            for (const auto& k : t->kids) ks.push_back(run(k));
            return assemble(std::move(ks));
        }
        case TermKind::Dagger:
            return fold_dagger(run(t->kid(0)));
        case TermKind::Transpose:
            return fold_transpose(run(t->kid(0)));
        case TermKind::Inverse: {
            TermPtr k = run(t->kid(0));
            if (k->kind == TermKind::ScalarLit && k->lit != Complex{})
                return t_lit(Complex{1.0, 0.0} / k->lit);
            return t_inverse(k);
        }
        default:
            return map_kids(t, [this](const TermPtr& k) { return run(k); });
        }
    }

private:
    const ShapeEnv& env_;

    bool scalar_shaped(const TermPtr& t) {
        ShapeInfer inf(env_);
        auto s = inf.infer(t);
        return s && s->is_scalar();
    }

    // Splits a flat factor list into scalar and non-scalar parts, folding
    // literal coefficients in operand order.
    TermPtr assemble(std::vector<TermPtr> kids) {
        std::vector<TermPtr> scalars, mats;
        for (auto& k : kids) {
            if (k->kind == TermKind::ScalarMul) {
                scalars.push_back(k->kid(0));
                const TermPtr& m = k->kid(1);
                if (m->kind == TermKind::Mul)
                    mats.insert(mats.end(), m->kids.begin(), m->kids.end());
                else
                    mats.push_back(m);
            } else if (k->kind == TermKind::Mul) {
                // A Mul kid is either a matrix product or the flat scalar
                // part of a ScalarMul; route it by its own shape.
                if (scalar_shaped(k))
                    scalars.push_back(k);
                else
                    mats.insert(mats.end(), k->kids.begin(), k->kids.end());
            } else if (scalar_shaped(k)) {
                scalars.push_back(k);
            } else {
                mats.push_back(k);
            }
        }
        Complex coef{1.0, 0.0};
        std::vector<TermPtr> syms;
        for (auto& s : scalars) {
            // Scalar parts of canonical kids are flat scalar Muls or atoms.
            std::vector<TermPtr> parts =
                s->kind == TermKind::Mul ? s->kids : std::vector<TermPtr>{s};
            for (auto& p : parts) {
                if (p->kind == TermKind::ScalarLit)
                    coef *= p->lit;
                else
                    syms.push_back(p);
            }
        }
        if (mats.empty()) {
            if (coef == Complex{}) return t_lit(Complex{});
            std::vector<TermPtr> sk;
            if (coef != Complex{1.0, 0.0} || syms.empty()) sk.push_back(t_lit(coef));
            sk.insert(sk.end(), syms.begin(), syms.end());
            return sk.size() == 1 ? sk[0] : t_nary(TermKind::Mul, std::move(sk));
        }
        TermPtr mpart = mats.size() == 1 ? mats[0] : t_nary(TermKind::Mul, std::move(mats));
        if (coef == Complex{}) {
            // A vanished coefficient collapses the product to a shaped zero;
            // the dropped symbol factors are sound (0 * s = 0). Wildcard
            // shapes (pattern variables) keep the scalar factor instead.
            ShapeInfer inf(env_);
            auto sh = inf.infer(mpart);
            if (sh && sh->is_matrix() && sh->rows && sh->cols)
                return t_zero(PatSort::Matrix, sh->rows, sh->cols);
            if (sh && sh->is_vector() && sh->rows) return t_zero(PatSort::Vector, sh->rows);
            return t_scalar_mul(t_lit(Complex{}), mpart);
        }
        if (coef == Complex{1.0, 0.0} && syms.empty()) return mpart;
        std::vector<TermPtr> sk;
        if (coef != Complex{1.0, 0.0} || syms.empty()) sk.push_back(t_lit(coef));
        sk.insert(sk.end(), syms.begin(), syms.end());
        TermPtr spart = sk.size() == 1 ? sk[0] : t_nary(TermKind::Mul, std::move(sk));
        return t_scalar_mul(spart, mpart);
    }

    TermPtr fold_dagger(const TermPtr& k) {
        switch (k->kind) {
        case TermKind::ScalarLit:
            return t_lit(std::conj(k->lit));
        case TermKind::SymScalar:
            // Declared scalar parameters range over the reals.
            return k;
        case TermKind::InnerProduct:
            return t_inner(k->kid(1), k->kid(0));
        case TermKind::GaugeLink:
            return t_link(k->dir, k->site, !k->dag);
        case TermKind::DirectSum:
            return t_dsum(k->name, k->set, fold_dagger(k->kid(0)));
        case TermKind::IndexedSum:
            return t_isum(k->name, k->set, fold_dagger(k->kid(0)));
        case TermKind::ScalarMul:
            // (sigma * M)^dag = conj(sigma) * M^dag
            return run(t_mul(fold_dagger(k->kid(0)), fold_dagger(k->kid(1))));
        case TermKind::Inverse:
            // dagger and inverse commute
            return t_inverse(fold_dagger(k->kid(0)));
        default:
            break;
        }
        if (scalar_shaped(k) &&
            (k->kind == TermKind::Mul || k->kind == TermKind::Add || k->kind == TermKind::Sub)) {
            return run(map_kids(k, [this](const TermPtr& c) { return fold_dagger(c); }));
        }
        return t_dagger(k);
    }

    TermPtr fold_transpose(const TermPtr& k) {
        if (k->kind == TermKind::DirectSum)
            return t_dsum(k->name, k->set, fold_transpose(k->kid(0)));
        if (k->kind == TermKind::IndexedSum)
            return t_isum(k->name, k->set, fold_transpose(k->kid(0)));
        if (k->kind == TermKind::ScalarMul)
            return run(t_mul(k->kid(0), fold_transpose(k->kid(1))));
        if (scalar_shaped(k)) return k;
        return t_transpose(k);
    }
};

inline TermPtr canon(const TermPtr& t, const ShapeEnv& env) {
    return Canonicalizer(env).run(t);
}

} // namespace qiral
