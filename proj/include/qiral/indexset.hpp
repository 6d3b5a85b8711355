#pragma once

// Index sets: the dimension descriptors that give every matrix and vector
// term its shape. A set is an immutable shared value; products are kept
// flattened so that structural equality coincides with shape equality.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qiral {

enum class SetKind { Lattice, Atomic, Product, Direction, Parity, Var };
enum class Parity { Even, Odd };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

class IndexSet;
using IndexSetPtr = std::shared_ptr<const IndexSet>;

class IndexSet {
public:
    SetKind kind;
    std::string name;                    // Atomic / Var; empty otherwise
    std::array<int, 4> dims{0, 0, 0, 0}; // Lattice / Parity
    Parity which = Parity::Even;         // Parity
    std::int64_t extent = 0;             // Atomic
    std::vector<IndexSetPtr> factors;    // Product, flattened

    static IndexSetPtr lattice(std::array<int, 4> d) {
        for (int e : d)
            if (e <= 0) throw std::invalid_argument("lattice extents must be positive");
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Lattice;
        s->dims = d;
        return s;
    }

    static IndexSetPtr atomic(std::string n, std::int64_t ext) {
        if (ext <= 0) throw std::invalid_argument("atomic extent must be positive");
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Atomic;
        s->name = std::move(n);
        s->extent = ext;
        return s;
    }

    static IndexSetPtr direction() {
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Direction;
        return s;
    }

    // The even or odd half of a lattice. Requires even extents so the two
    // parity classes have equal size.
    static IndexSetPtr parity_half(std::array<int, 4> d, Parity p) {
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Parity;
        s->dims = d;
        s->which = p;
        return s;
    }

    static IndexSetPtr parity_half(const IndexSetPtr& lattice, Parity p) {
        if (!lattice || lattice->kind != SetKind::Lattice)
            throw std::invalid_argument("parity half of a non-lattice set");
        return parity_half(lattice->dims, p);
    }

    static IndexSetPtr set_var(std::string n) {
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Var;
        s->name = std::move(n);
        return s;
    }

    // product(product(A,B),C) and product(A,product(B,C)) flatten to the
    // same factor list.
    static IndexSetPtr product(std::vector<IndexSetPtr> fs) {
        std::vector<IndexSetPtr> flat;
        for (auto& f : fs) {
            if (!f) throw std::invalid_argument("null index set factor");
            if (f->kind == SetKind::Product)
                flat.insert(flat.end(), f->factors.begin(), f->factors.end());
            else
                flat.push_back(f);
        }
        if (flat.empty()) throw std::invalid_argument("empty index set product");
        if (flat.size() == 1) return flat[0];
        auto s = std::make_shared<IndexSet>();
        s->kind = SetKind::Product;
        s->factors = std::move(flat);
        return s;
    }

    std::int64_t cardinality() const {
        switch (kind) {
        case SetKind::Lattice:
            return std::int64_t(dims[0]) * dims[1] * dims[2] * dims[3];
        case SetKind::Atomic:
            return extent;
        case SetKind::Direction:
            return 4;
        case SetKind::Parity:
            return std::int64_t(dims[0]) * dims[1] * dims[2] * dims[3] / 2;
        case SetKind::Product: {
            std::int64_t c = 1;
            for (auto& f : factors) c *= f->cardinality();
            return c;
        }
        case SetKind::Var:
            throw std::logic_error("cardinality of unbound set variable " + name);
        }
        return 0;
    }

    bool equals(const IndexSet& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
        case SetKind::Lattice:
            return dims == o.dims;
        case SetKind::Atomic:
            return name == o.name && extent == o.extent;
        case SetKind::Direction:
            return true;
        case SetKind::Parity:
            return dims == o.dims && which == o.which;
        case SetKind::Var:
            return name == o.name;
        case SetKind::Product: {
            if (factors.size() != o.factors.size()) return false;
            for (size_t i = 0; i < factors.size(); ++i)
                if (!factors[i]->equals(*o.factors[i])) return false;
            return true;
        }
        }
        return false;
    }

    std::string str() const {
        std::ostringstream os;
        switch (kind) {
        case SetKind::Lattice:
            os << "L";
            break;
        case SetKind::Atomic:
            os << name;
            break;
        case SetKind::Direction:
            os << "D";
            break;
        case SetKind::Parity:
            os << parity_name(which) << "(L)";
            break;
        case SetKind::Var:
            os << "?" << name;
            break;
        case SetKind::Product:
            for (size_t i = 0; i < factors.size(); ++i) {
                if (i) os << " (x) ";
                os << factors[i]->str();
            }
            break;
        }
        return os.str();
    }
};

inline bool set_eq(const IndexSetPtr& a, const IndexSetPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->equals(*b);
}

inline IndexSetPtr set_product(IndexSetPtr a, IndexSetPtr b) {
    return IndexSet::product({std::move(a), std::move(b)});
}

inline bool contains_set_var(const IndexSetPtr& s) {
    if (!s) return false;
    if (s->kind == SetKind::Var) return true;
    if (s->kind == SetKind::Product)
        for (const auto& f : s->factors)
            if (contains_set_var(f)) return true;
    return false;
}

// Replaces set variables; unbound variables stay as-is.
inline IndexSetPtr set_subst(const IndexSetPtr& s, const std::map<std::string, IndexSetPtr>& m) {
    if (!s) return s;
    if (s->kind == SetKind::Var) {
        auto it = m.find(s->name);
        return it == m.end() ? s : it->second;
    }
    if (s->kind == SetKind::Product) {
        std::vector<IndexSetPtr> fs;
        fs.reserve(s->factors.size());
        for (const auto& f : s->factors) fs.push_back(set_subst(f, m));
        return IndexSet::product(std::move(fs));
    }
    return s;
}

} // namespace qiral
