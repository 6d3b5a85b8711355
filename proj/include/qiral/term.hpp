#pragma once

// The algebraic term IR. Terms are immutable shared trees; Add, Mul and
// Tensor are kept flattened n-ary so matching modulo associativity (and
// commutativity, for Add) works on operand lists. There is deliberately no
// element-wise access anywhere: matrices and vectors exist only through
// the structural operators.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qiral/indexset.hpp"

namespace qiral {

using Complex = std::complex<double>;

enum class TermKind {
    ScalarLit,
    SymScalar,
    ImagUnit,
    Identity,
    Gamma,
    Gamma5,
    Shift,
    GaugeLink,
    Projection,
    VectorSym,
    MatrixSym,
    Add,       // n-ary, >= 2 operands
    Sub,
    Mul,       // n-ary, >= 2 operands
    ScalarMul, // (scalar, operand); engine-internal canonical form
    Tensor,    // n-ary, >= 2 operands
    DirectSum, // binder over a domain, per-element block
    IndexedSum,
    Transpose,
    Dagger,
    Inverse,
    SubVector,
    InnerProduct,
    Neg,
    PatVar,
    Zero, // engine-internal: a zero matrix/vector with explicit shape
};

enum class PatSort { Matrix, Vector, Scalar };

// A direction expression: a literal axis (0..3 for x,y,z,t), or a variable
// bound by an indexed sum / pattern, optionally negated.
struct Dir {
    int axis = -1;   // -1 when symbolic
    std::string var; // non-empty when symbolic
    bool neg = false;

    static Dir lit(int a, bool n = false) { return Dir{a, {}, n}; }
    static Dir of_var(std::string v, bool n = false) { return Dir{-1, std::move(v), n}; }

    bool symbolic() const { return axis < 0; }
    Dir negated() const { return Dir{axis, var, !neg}; }

    bool operator==(const Dir& o) const { return axis == o.axis && var == o.var && neg == o.neg; }

    std::string str() const {
        static const char* names[4] = {"x", "y", "z", "t"};
        std::string base = symbolic() ? var : names[axis];
        return neg ? "-" + base : base;
    }
};

class Term;
using TermPtr = std::shared_ptr<const Term>;
using TermList = std::vector<TermPtr>;

class Term {
public:
    TermKind kind;
    Complex lit{0.0, 0.0};            // ScalarLit
    std::string name;                 // symbols, binders, pattern vars
    IndexSetPtr set;                  // Identity / Shift / Projection / binder domain / SubVector / Zero rows
    IndexSetPtr set2;                 // Zero cols
    Dir dir;                          // Gamma / Shift / GaugeLink
    std::string site;                 // GaugeLink site binder
    bool dag = false;                 // GaugeLink conjugate-transpose flag
    Parity parity = Parity::Even;     // Projection
    PatSort sort = PatSort::Matrix;   // PatVar / Zero (matrix or vector)
    TermList kids;
    int line = 0, col = 0;            // source position; ignored by term_cmp

    explicit Term(TermKind k) : kind(k) {}

    const TermPtr& kid(size_t i) const { return kids[i]; }
    size_t arity() const { return kids.size(); }
};

// ---- constructors ---------------------------------------------------------

inline TermPtr mk(TermKind k) { return std::make_shared<Term>(k); }

inline TermPtr t_lit(Complex c) {
    auto t = std::make_shared<Term>(TermKind::ScalarLit);
    t->lit = c;
    return t;
}
inline TermPtr t_lit(double re) { return t_lit(Complex(re, 0.0)); }

inline TermPtr t_scalar(std::string name) {
    auto t = std::make_shared<Term>(TermKind::SymScalar);
    t->name = std::move(name);
    return t;
}

inline TermPtr t_imag() { return mk(TermKind::ImagUnit); }

inline TermPtr t_identity(IndexSetPtr over) {
    auto t = std::make_shared<Term>(TermKind::Identity);
    t->set = std::move(over);
    return t;
}

inline TermPtr t_gamma(Dir d) {
    auto t = std::make_shared<Term>(TermKind::Gamma);
    t->dir = d;
    return t;
}

inline TermPtr t_gamma5() { return mk(TermKind::Gamma5); }

inline TermPtr t_shift(IndexSetPtr lattice, Dir d) {
    auto t = std::make_shared<Term>(TermKind::Shift);
    t->set = std::move(lattice);
    t->dir = d;
    return t;
}

inline TermPtr t_link(Dir d, std::string site, bool dagged = false) {
    auto t = std::make_shared<Term>(TermKind::GaugeLink);
    t->dir = d;
    t->site = std::move(site);
    t->dag = dagged;
    return t;
}

inline TermPtr t_proj(Parity p, IndexSetPtr lattice) {
    auto t = std::make_shared<Term>(TermKind::Projection);
    t->parity = p;
    t->set = std::move(lattice);
    return t;
}

inline TermPtr t_vec(std::string name) {
    auto t = std::make_shared<Term>(TermKind::VectorSym);
    t->name = std::move(name);
    return t;
}

inline TermPtr t_mat(std::string name) {
    auto t = std::make_shared<Term>(TermKind::MatrixSym);
    t->name = std::move(name);
    return t;
}

inline TermPtr t_pat(std::string name, PatSort s) {
    auto t = std::make_shared<Term>(TermKind::PatVar);
    t->name = std::move(name);
    t->sort = s;
    return t;
}

// Zero matrix (rows, cols) or zero vector (rows only). Null sets act as
// wildcards in patterns.
inline TermPtr t_zero(PatSort s, IndexSetPtr rows, IndexSetPtr cols = nullptr) {
    auto t = std::make_shared<Term>(TermKind::Zero);
    t->sort = s;
    t->set = std::move(rows);
    t->set2 = std::move(cols);
    return t;
}

// n-ary nodes flatten at construction so associativity is representational.
inline TermPtr t_nary(TermKind k, TermList ops) {
    TermList flat;
    for (auto& o : ops) {
        if (!o) throw std::invalid_argument("null term operand");
        if (o->kind == k)
            flat.insert(flat.end(), o->kids.begin(), o->kids.end());
        else
            flat.push_back(o);
    }
    if (flat.empty()) throw std::invalid_argument("empty n-ary term");
    if (flat.size() == 1) return flat[0];
    auto t = std::make_shared<Term>(k);
    t->kids = std::move(flat);
    return t;
}

inline TermPtr t_add(TermList ops) { return t_nary(TermKind::Add, std::move(ops)); }
inline TermPtr t_add(TermPtr a, TermPtr b) { return t_add(TermList{std::move(a), std::move(b)}); }
inline TermPtr t_mul(TermList ops) { return t_nary(TermKind::Mul, std::move(ops)); }
inline TermPtr t_mul(TermPtr a, TermPtr b) { return t_mul(TermList{std::move(a), std::move(b)}); }
inline TermPtr t_tensor(TermList ops) { return t_nary(TermKind::Tensor, std::move(ops)); }
inline TermPtr t_tensor(TermPtr a, TermPtr b) { return t_tensor(TermList{std::move(a), std::move(b)}); }

inline TermPtr t_unary(TermKind k, TermPtr a) {
    auto t = std::make_shared<Term>(k);
    t->kids.push_back(std::move(a));
    return t;
}
inline TermPtr t_binary(TermKind k, TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>(k);
    t->kids.push_back(std::move(a));
    t->kids.push_back(std::move(b));
    return t;
}

inline TermPtr t_sub(TermPtr a, TermPtr b) { return t_binary(TermKind::Sub, std::move(a), std::move(b)); }
inline TermPtr t_scalar_mul(TermPtr s, TermPtr m) { return t_binary(TermKind::ScalarMul, std::move(s), std::move(m)); }
inline TermPtr t_neg(TermPtr a) { return t_unary(TermKind::Neg, std::move(a)); }
inline TermPtr t_transpose(TermPtr a) { return t_unary(TermKind::Transpose, std::move(a)); }
inline TermPtr t_dagger(TermPtr a) { return t_unary(TermKind::Dagger, std::move(a)); }
inline TermPtr t_inverse(TermPtr a) { return t_unary(TermKind::Inverse, std::move(a)); }
inline TermPtr t_inner(TermPtr a, TermPtr b) { return t_binary(TermKind::InnerProduct, std::move(a), std::move(b)); }

inline TermPtr t_subvector(TermPtr v, IndexSetPtr over) {
    auto t = t_unary(TermKind::SubVector, std::move(v));
    const_cast<Term&>(*t).set = std::move(over);
    return t;
}

inline TermPtr t_dsum(std::string binder, IndexSetPtr domain, TermPtr body) {
    auto t = t_unary(TermKind::DirectSum, std::move(body));
    auto& m = const_cast<Term&>(*t);
    m.name = std::move(binder);
    m.set = std::move(domain);
    return t;
}

inline TermPtr t_isum(std::string binder, IndexSetPtr domain, TermPtr body) {
    auto t = t_unary(TermKind::IndexedSum, std::move(body));
    auto& m = const_cast<Term&>(*t);
    m.name = std::move(binder);
    m.set = std::move(domain);
    return t;
}

// ---- structural comparison ------------------------------------------------

inline int cmp_sets(const IndexSetPtr& a, const IndexSetPtr& b) {
    if (!a && !b) return 0;
    if (!a) return -1;
    if (!b) return 1;
    auto sa = a->str(), sb = b->str();
    return sa == sb ? 0 : (sa < sb ? -1 : 1);
}

inline int term_cmp(const TermPtr& a, const TermPtr& b) {
    if (a == b) return 0;
    if (a->kind != b->kind) return int(a->kind) < int(b->kind) ? -1 : 1;
    switch (a->kind) {
    case TermKind::ScalarLit: {
        if (a->lit.real() != b->lit.real()) return a->lit.real() < b->lit.real() ? -1 : 1;
        if (a->lit.imag() != b->lit.imag()) return a->lit.imag() < b->lit.imag() ? -1 : 1;
        return 0;
    }
    default:
        break;
    }
    if (a->name != b->name) return a->name < b->name ? -1 : 1;
    if (a->site != b->site) return a->site < b->site ? -1 : 1;
    if (a->dag != b->dag) return a->dag < b->dag ? -1 : 1;
    if (a->parity != b->parity) return int(a->parity) < int(b->parity) ? -1 : 1;
    if (a->sort != b->sort) return int(a->sort) < int(b->sort) ? -1 : 1;
    if (!(a->dir == b->dir)) {
        auto da = a->dir.str(), db = b->dir.str();
        return da < db ? -1 : 1;
    }
    if (int c = cmp_sets(a->set, b->set)) return c;
    if (int c = cmp_sets(a->set2, b->set2)) return c;
    if (a->arity() != b->arity()) return a->arity() < b->arity() ? -1 : 1;
    for (size_t i = 0; i < a->arity(); ++i)
        if (int c = term_cmp(a->kid(i), b->kid(i))) return c;
    return 0;
}

inline bool term_eq(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) == 0; }

// ---- traversal ------------------------------------------------------------

inline TermPtr with_kids(const TermPtr& t, TermList kids) {
    auto n = std::make_shared<Term>(*t);
    n->kids = std::move(kids);
    // re-flatten in case a child collapsed into the same n-ary kind
    if (n->kind == TermKind::Add || n->kind == TermKind::Mul || n->kind == TermKind::Tensor)
        return t_nary(n->kind, std::move(n->kids));
    return n;
}

template <class F>
TermPtr map_kids(const TermPtr& t, F&& f) {
    if (t->kids.empty()) return t;
    TermList ks;
    ks.reserve(t->arity());
    bool changed = false;
    for (auto& k : t->kids) {
        TermPtr nk = f(k);
        changed |= (nk != k);
        ks.push_back(std::move(nk));
    }
    return changed ? with_kids(t, std::move(ks)) : t;
}

template <class F>
void for_each_node(const TermPtr& t, F&& f) {
    f(t);
    for (auto& k : t->kids) for_each_node(k, f);
}

inline bool contains_kind(const TermPtr& t, TermKind k) {
    if (t->kind == k) return true;
    for (auto& c : t->kids)
        if (contains_kind(c, k)) return true;
    return false;
}

// ---- substitution ---------------------------------------------------------

using Subst = std::map<std::string, TermPtr>;

// Replaces named leaves (pattern variables and symbols) by terms.
inline TermPtr subst(const TermPtr& t, const Subst& s) {
    switch (t->kind) {
    case TermKind::PatVar:
    case TermKind::VectorSym:
    case TermKind::MatrixSym:
    case TermKind::SymScalar: {
        auto it = s.find(t->name);
        if (it != s.end()) return it->second;
        return t;
    }
    default:
        return map_kids(t, [&](const TermPtr& k) { return subst(k, s); });
    }
}

// Replaces a direction variable by a literal axis, folding negation.
inline TermPtr subst_dir(const TermPtr& t, const std::string& var, int axis) {
    TermPtr r = map_kids(t, [&](const TermPtr& k) { return subst_dir(k, var, axis); });
    if ((r->kind == TermKind::Gamma || r->kind == TermKind::Shift || r->kind == TermKind::GaugeLink) &&
        r->dir.symbolic() && r->dir.var == var) {
        auto n = std::make_shared<Term>(*r);
        n->dir = Dir::lit(axis, r->dir.neg);
        return n;
    }
    return r;
}

// Replaces a direction variable by another direction, composing signs.
inline TermPtr subst_dir(const TermPtr& t, const std::string& var, Dir target) {
    TermPtr r = map_kids(t, [&](const TermPtr& k) { return subst_dir(k, var, target); });
    if ((r->kind == TermKind::Gamma || r->kind == TermKind::Shift || r->kind == TermKind::GaugeLink) &&
        r->dir.symbolic() && r->dir.var == var) {
        auto n = std::make_shared<Term>(*r);
        n->dir = r->dir.neg ? target.negated() : target;
        return n;
    }
    return r;
}

// Replaces set variables wherever a term carries an index set.
inline TermPtr subst_sets(const TermPtr& t, const std::map<std::string, IndexSetPtr>& m) {
    TermPtr r = map_kids(t, [&](const TermPtr& k) { return subst_sets(k, m); });
    if (r->set && contains_set_var(r->set)) {
        auto n = std::make_shared<Term>(*r);
        n->set = set_subst(r->set, m);
        return n;
    }
    return r;
}

// ---- debug printing (IR form; surface syntax lives in printer.hpp) --------

inline std::string term_str(const TermPtr& t) {
    std::ostringstream os;
    auto join = [&](const char* op) {
        os << "(";
        for (size_t i = 0; i < t->arity(); ++i) {
            if (i) os << " " << op << " ";
            os << term_str(t->kid(i));
        }
        os << ")";
    };
    switch (t->kind) {
    case TermKind::ScalarLit: {
        if (t->lit.imag() == 0.0) {
            os << t->lit.real();
        } else {
            os << "(" << t->lit.real() << "+" << t->lit.imag() << "i)";
        }
        break;
    }
    case TermKind::SymScalar: os << t->name; break;
    case TermKind::ImagUnit: os << "i"; break;
    case TermKind::Identity: os << "I_{" << t->set->str() << "}"; break;
    case TermKind::Gamma: os << "gamma[" << t->dir.str() << "]"; break;
    case TermKind::Gamma5: os << "gamma5"; break;
    case TermKind::Shift: os << "shift(L," << t->dir.str() << ")"; break;
    case TermKind::GaugeLink:
        os << "U(" << t->dir.str() << ")[" << t->site << "]" << (t->dag ? "^dag" : "");
        break;
    case TermKind::Projection: os << "proj(" << parity_name(t->parity) << ",L)"; break;
    case TermKind::VectorSym: os << t->name; break;
    case TermKind::MatrixSym: os << t->name; break;
    case TermKind::Add: join("+"); break;
    case TermKind::Sub: os << "(" << term_str(t->kid(0)) << " - " << term_str(t->kid(1)) << ")"; break;
    case TermKind::Mul: join("*"); break;
    case TermKind::ScalarMul:
        os << "(" << term_str(t->kid(0)) << " . " << term_str(t->kid(1)) << ")";
        break;
    case TermKind::Tensor: join("(x)"); break;
    case TermKind::DirectSum:
        os << "(dsum " << t->name << " in " << t->set->str() << " : " << term_str(t->kid(0)) << ")";
        break;
    case TermKind::IndexedSum:
        os << "(sum " << t->name << " in " << t->set->str() << " : " << term_str(t->kid(0)) << ")";
        break;
    case TermKind::Transpose: os << term_str(t->kid(0)) << "^t"; break;
    case TermKind::Dagger: os << "dagger(" << term_str(t->kid(0)) << ")"; break;
    case TermKind::Inverse: os << term_str(t->kid(0)) << "^-1"; break;
    case TermKind::SubVector: os << term_str(t->kid(0)) << "[" << t->set->str() << "]"; break;
    case TermKind::InnerProduct:
        os << "<" << term_str(t->kid(0)) << " | " << term_str(t->kid(1)) << ">";
        break;
    case TermKind::Neg: os << "-" << term_str(t->kid(0)); break;
    case TermKind::PatVar: os << "?" << t->name; break;
    case TermKind::Zero:
        os << "0_{" << (t->set ? t->set->str() : "?");
        if (t->sort == PatSort::Matrix) os << ", " << (t->set2 ? t->set2->str() : "?");
        os << "}";
        break;
    }
    return os.str();
}

inline bool is_zero(const TermPtr& t) {
    return t->kind == TermKind::ScalarLit && t->lit == Complex(0.0, 0.0);
}
inline bool is_one(const TermPtr& t) {
    return t->kind == TermKind::ScalarLit && t->lit == Complex(1.0, 0.0);
}

} // namespace qiral
