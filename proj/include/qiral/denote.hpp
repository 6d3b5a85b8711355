#pragma once

// Reference denotation: maps a term to a dense matrix (scalars 1x1, vectors
// n x 1) under an environment binding the lattice, the gauge configuration,
// parameter values and free symbols. Structural operators map onto their
// textbook dense forms, so this is the ground truth every other stage is
// checked against.

#include <map>
#include <stdexcept>
#include <string>

#include "qiral/dense.hpp"
#include "qiral/gamma.hpp"
#include "qiral/gauge.hpp"
#include "qiral/lattice.hpp"
#include "qiral/shape.hpp"
#include "qiral/term.hpp"

namespace qiral {

struct DenoteEnv {
    const LatticeGeom* geom = nullptr;
    const GaugeField* gauge = nullptr;
    std::map<std::string, Complex> scalars;
    std::map<std::string, Dense> bind;   // vector and matrix symbols
    std::map<std::string, long> sites;   // direct-sum binders
    std::map<std::string, int> dirs;     // direction binders
};

namespace detail {

inline Dense embed4(const Mat4& m) {
    Dense d(4, 4);
    for (long i = 0; i < 4; ++i)
        for (long j = 0; j < 4; ++j) d(i, j) = m(size_t(i), size_t(j));
    return d;
}

inline Dense embed3(const Mat3& m) {
    Dense d(3, 3);
    for (long i = 0; i < 3; ++i)
        for (long j = 0; j < 3; ++j) d(i, j) = m(size_t(i), size_t(j));
    return d;
}

inline int resolve_axis(const Dir& d, const DenoteEnv& env, bool* neg) {
    *neg = d.neg;
    if (!d.symbolic()) return d.axis;
    auto it = env.dirs.find(d.var);
    if (it == env.dirs.end())
        throw std::runtime_error("unbound direction variable '" + d.var + "'");
    return it->second;
}

inline const LatticeGeom& geom_for(const IndexSetPtr& s, const DenoteEnv& env) {
    if (!env.geom) throw std::runtime_error("no lattice bound in denotation environment");
    if (s && (s->kind == SetKind::Lattice || s->kind == SetKind::Parity) &&
        s->dims != env.geom->extents())
        throw std::runtime_error("term lattice " + s->str() + " differs from bound lattice");
    return *env.geom;
}

} // namespace detail

inline Dense denote(const TermPtr& t, const DenoteEnv& env) {
    using detail::embed3;
    using detail::embed4;
    switch (t->kind) {
    case TermKind::ScalarLit:
        return Dense::scalar(t->lit);
    case TermKind::ImagUnit:
        return Dense::scalar(Complex(0.0, 1.0));
    case TermKind::SymScalar: {
        auto it = env.scalars.find(t->name);
        if (it != env.scalars.end()) return Dense::scalar(it->second);
        auto ib = env.bind.find(t->name);
        if (ib != env.bind.end()) return ib->second;
        throw std::runtime_error("unbound scalar '" + t->name + "'");
    }
    case TermKind::Identity:
        return Dense::ident(long(t->set->cardinality()));
    case TermKind::Gamma: {
        bool neg = false;
        int axis = detail::resolve_axis(t->dir, env, &neg);
        Dense g = embed4(gamma_mat(axis));
        return neg ? -g : g;
    }
    case TermKind::Gamma5:
        return embed4(gamma5_mat());
    case TermKind::Shift: {
        const LatticeGeom& g = detail::geom_for(t->set, env);
        bool neg = false;
        int axis = detail::resolve_axis(t->dir, env, &neg);
        Dense m(g.volume(), g.volume());
        for (long s = 0; s < g.volume(); ++s) m(s, g.neighbor(s, axis, neg ? -1 : 1)) = 1.0;
        return m;
    }
    case TermKind::GaugeLink: {
        if (!env.gauge) throw std::runtime_error("no gauge field bound in denotation environment");
        auto it = env.sites.find(t->site);
        if (it == env.sites.end())
            throw std::runtime_error("unbound site variable '" + t->site + "'");
        long site = it->second;
        bool neg = false;
        int axis = detail::resolve_axis(t->dir, env, &neg);
        Mat3 u;
        if (!neg) {
            u = env.gauge->link(site, axis);
        } else {
            // Hop in the negative direction uses the conjugate link that
            // points back at this site.
            long from = env.gauge->geom().neighbor(site, axis, -1);
            u = env.gauge->link(from, axis).dagger();
        }
        if (t->dag) u = u.dagger();
        return embed3(u);
    }
    case TermKind::Projection: {
        const LatticeGeom& g = detail::geom_for(t->set, env);
        const auto& list = g.sites(t->parity);
        Dense m(long(list.size()), g.volume());
        for (size_t i = 0; i < list.size(); ++i) m(long(i), list[i]) = 1.0;
        return m;
    }
    case TermKind::VectorSym:
    case TermKind::MatrixSym:
    case TermKind::PatVar: {
        auto it = env.bind.find(t->name);
        if (it == env.bind.end()) throw std::runtime_error("unbound symbol '" + t->name + "'");
        return it->second;
    }
    case TermKind::Add: {
        Dense acc = denote(t->kid(0), env);
        for (size_t i = 1; i < t->arity(); ++i) acc = acc + denote(t->kid(i), env);
        return acc;
    }
    case TermKind::Sub:
        return denote(t->kid(0), env) - denote(t->kid(1), env);
    case TermKind::Neg:
        return -denote(t->kid(0), env);
    case TermKind::Mul: {
        Dense acc = denote(t->kid(0), env);
        for (size_t i = 1; i < t->arity(); ++i) acc = acc * denote(t->kid(i), env);
        return acc;
    }
    case TermKind::ScalarMul: {
        Dense s = denote(t->kid(0), env);
        if (!s.is_scalar()) throw std::runtime_error("scaling factor is not a scalar");
        return denote(t->kid(1), env).scaled(s(0, 0));
    }
    case TermKind::Tensor: {
        Dense acc = denote(t->kid(0), env);
        for (size_t i = 1; i < t->arity(); ++i) acc = acc.kron(denote(t->kid(i), env));
        return acc;
    }
    case TermKind::DirectSum: {
        if (!t->set) throw std::runtime_error("direct sum without a domain");
        if (t->set->kind != SetKind::Lattice && t->set->kind != SetKind::Parity)
            throw std::runtime_error("direct sum over unsupported domain " + t->set->str());
        const LatticeGeom& g = detail::geom_for(t->set, env);
        std::vector<long> domain;
        if (t->set->kind == SetKind::Lattice) {
            domain.resize(size_t(g.volume()));
            for (long s = 0; s < g.volume(); ++s) domain[size_t(s)] = s;
        } else {
            domain = g.sites(t->set->which);
        }
        DenoteEnv inner = env;
        std::vector<Dense> blocks;
        blocks.reserve(domain.size());
        long br = 0, bc = 0;
        for (long s : domain) {
            inner.sites[t->name] = s;
            blocks.push_back(denote(t->kid(0), inner));
            if (blocks.size() == 1) {
                br = blocks[0].rows();
                bc = blocks[0].cols();
            }
        }
        Dense m(br * long(domain.size()), bc * long(domain.size()));
        for (size_t k = 0; k < blocks.size(); ++k)
            for (long i = 0; i < br; ++i)
                for (long j = 0; j < bc; ++j)
                    m(long(k) * br + i, long(k) * bc + j) = blocks[k](i, j);
        return m;
    }
    case TermKind::IndexedSum: {
        if (!t->set || t->set->kind != SetKind::Direction)
            throw std::runtime_error("indexed sum over unsupported domain");
        DenoteEnv inner = env;
        Dense acc;
        for (int axis = 0; axis < 4; ++axis) {
            inner.dirs[t->name] = axis;
            Dense v = denote(t->kid(0), inner);
            acc = axis == 0 ? std::move(v) : acc + v;
        }
        return acc;
    }
    case TermKind::Transpose:
        return denote(t->kid(0), env).transpose();
    case TermKind::Dagger:
        return denote(t->kid(0), env).dagger();
    case TermKind::Inverse:
        return dense_inverse(denote(t->kid(0), env));
    case TermKind::SubVector: {
        Dense v = denote(t->kid(0), env);
        if (!v.is_column()) throw std::runtime_error("sub-vector of a non-vector");
        if (!t->set || t->set->kind != SetKind::Product || t->set->factors.empty() ||
            t->set->factors[0]->kind != SetKind::Parity)
            throw std::runtime_error("sub-vector over unsupported set");
        const LatticeGeom& g = detail::geom_for(t->set->factors[0], env);
        long block = v.rows() / g.volume();
        if (block * g.volume() != v.rows())
            throw std::runtime_error("sub-vector length not a multiple of the lattice volume");
        const auto& list = g.sites(t->set->factors[0]->which);
        Dense r(long(list.size()) * block, 1);
        for (size_t i = 0; i < list.size(); ++i)
            for (long b = 0; b < block; ++b) r(long(i) * block + b, 0) = v(list[i] * block + b, 0);
        return r;
    }
    case TermKind::InnerProduct:
        return Dense::scalar(dense_dot(denote(t->kid(0), env), denote(t->kid(1), env)));
    case TermKind::Zero: {
        if (!t->set) throw std::runtime_error("zero term without a shape");
        long r = long(t->set->cardinality());
        long c = t->sort == PatSort::Vector ? 1
                                            : (t->set2 ? long(t->set2->cardinality()) : 0);
        if (c <= 0) throw std::runtime_error("zero term without a column shape");
        return Dense(r, c);
    }
    }
    throw std::runtime_error("denote: unhandled term kind");
}

} // namespace qiral
