#pragma once

// Shape inference over terms. A shape is Scalar, Vector(over) or
// Matrix(rows, cols) where the extents are index-set expressions. Inference
// accumulates diagnostics instead of stopping at the first error; a null
// result for a subterm poisons its parents silently so each root error is
// reported once.

#include <optional>
#include <string>
#include <vector>

#include "qiral/indexset.hpp"
#include "qiral/term.hpp"

namespace qiral {

enum class ShapeKind { Scalar, Vector, Matrix };

struct Shape {
    ShapeKind kind = ShapeKind::Scalar;
    IndexSetPtr rows; // Vector: element set; Matrix: row set
    IndexSetPtr cols; // Matrix only

    static Shape scalar() { return Shape{ShapeKind::Scalar, nullptr, nullptr}; }
    static Shape vector(IndexSetPtr over) { return Shape{ShapeKind::Vector, std::move(over), nullptr}; }
    static Shape matrix(IndexSetPtr r, IndexSetPtr c) { return Shape{ShapeKind::Matrix, std::move(r), std::move(c)}; }

    bool is_scalar() const { return kind == ShapeKind::Scalar; }
    bool is_vector() const { return kind == ShapeKind::Vector; }
    bool is_matrix() const { return kind == ShapeKind::Matrix; }

    std::string str() const {
        switch (kind) {
        case ShapeKind::Scalar: return "scalar";
        case ShapeKind::Vector: return "vector(" + (rows ? rows->str() : "?") + ")";
        case ShapeKind::Matrix:
            return "matrix(" + (rows ? rows->str() : "?") + ", " + (cols ? cols->str() : "?") + ")";
        }
        return "?";
    }
};

// Null sets act as wildcards so pattern variables unify with anything.
inline bool set_compat(const IndexSetPtr& a, const IndexSetPtr& b) {
    if (!a || !b) return true;
    return set_eq(a, b);
}

inline bool shape_compat(const Shape& a, const Shape& b) {
    if (a.kind != b.kind) return false;
    return set_compat(a.rows, b.rows) && set_compat(a.cols, b.cols);
}

struct Diag {
    int line = 0;
    int col = 0;
    std::string msg;

    std::string str() const {
        if (line <= 0) return msg;
        return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
    }
};

struct ShapeEnv {
    std::map<std::string, Shape> bind;

    const Shape* find(const std::string& n) const {
        auto it = bind.find(n);
        return it == bind.end() ? nullptr : &it->second;
    }
    void set(const std::string& n, Shape s) { bind[n] = std::move(s); }
};

// Fixed internal spaces: 3 colors, 4 spin components.
inline const IndexSetPtr& color_set() {
    static IndexSetPtr s = IndexSet::atomic("C", 3);
    return s;
}
inline const IndexSetPtr& spin_set() {
    static IndexSetPtr s = IndexSet::atomic("S", 4);
    return s;
}

class ShapeInfer {
public:
    explicit ShapeInfer(const ShapeEnv& env) : env_(env) {}

    std::vector<Diag> diags;

    std::optional<Shape> infer(const TermPtr& t) {
        switch (t->kind) {
        case TermKind::ScalarLit:
        case TermKind::ImagUnit:
            return Shape::scalar();
        case TermKind::SymScalar: {
            if (const Shape* s = env_.find(t->name)) {
                if (!s->is_scalar()) return fail(t, "'" + t->name + "' is not a scalar here");
                return *s;
            }
            return Shape::scalar();
        }
        case TermKind::Identity:
            return Shape::matrix(t->set, t->set);
        case TermKind::Gamma:
        case TermKind::Gamma5:
            return Shape::matrix(spin_set(), spin_set());
        case TermKind::Shift:
            return Shape::matrix(t->set, t->set);
        case TermKind::GaugeLink:
            return Shape::matrix(color_set(), color_set());
        case TermKind::Projection:
            return Shape::matrix(IndexSet::parity_half(t->set, t->parity), t->set);
        case TermKind::VectorSym: {
            if (const Shape* s = env_.find(t->name)) {
                if (!s->is_vector()) return fail(t, "'" + t->name + "' is bound as " + s->str() + ", used as a vector");
                return *s;
            }
            return fail(t, "unbound vector symbol '" + t->name + "'");
        }
        case TermKind::MatrixSym: {
            if (const Shape* s = env_.find(t->name)) {
                if (!s->is_matrix()) return fail(t, "'" + t->name + "' is bound as " + s->str() + ", used as a matrix");
                return *s;
            }
            return fail(t, "unbound matrix symbol '" + t->name + "'");
        }
        case TermKind::PatVar:
            switch (t->sort) {
            case PatSort::Scalar: return Shape::scalar();
            case PatSort::Vector: return Shape::vector(nullptr);
            case PatSort::Matrix: return Shape::matrix(nullptr, nullptr);
            }
            return std::nullopt;
        case TermKind::Zero:
            return t->sort == PatSort::Vector ? Shape::vector(t->set)
                                              : Shape::matrix(t->set, t->set2);
        case TermKind::Add: {
            std::optional<Shape> acc;
            for (auto& k : t->kids) {
                auto s = infer(k);
                if (!s) return std::nullopt;
                if (!acc) {
                    acc = s;
                } else if (!shape_compat(*acc, *s)) {
                    return fail(t, "sum mixes " + acc->str() + " with " + s->str());
                } else {
                    acc = merge(*acc, *s);
                }
            }
            return acc;
        }
        case TermKind::Sub:
        case TermKind::Neg: {
            std::optional<Shape> acc;
            for (auto& k : t->kids) {
                auto s = infer(k);
                if (!s) return std::nullopt;
                if (!acc) {
                    acc = s;
                } else if (!shape_compat(*acc, *s)) {
                    return fail(t, "difference mixes " + acc->str() + " with " + s->str());
                } else {
                    acc = merge(*acc, *s);
                }
            }
            return acc;
        }
        case TermKind::Mul: {
            std::optional<Shape> acc;
            for (auto& k : t->kids) {
                auto s = infer(k);
                if (!s) return std::nullopt;
                if (!acc) {
                    acc = s;
                    continue;
                }
                acc = combine_mul(t, *acc, *s);
                if (!acc) return std::nullopt;
            }
            return acc;
        }
        case TermKind::ScalarMul: {
            auto s = infer(t->kid(0));
            auto m = infer(t->kid(1));
            if (!s || !m) return std::nullopt;
            if (!s->is_scalar()) return fail(t, "scaling factor has shape " + s->str());
            return m;
        }
        case TermKind::Tensor: {
            std::vector<IndexSetPtr> rows, cols;
            bool all_vec = true, all_mat = true;
            for (auto& k : t->kids) {
                auto s = infer(k);
                if (!s) return std::nullopt;
                if (s->is_scalar()) return fail(t, "tensor factor is a scalar");
                all_vec &= s->is_vector();
                all_mat &= s->is_matrix();
                if (!s->rows) return Shape::matrix(nullptr, nullptr); // wildcard factor
                rows.push_back(s->rows);
                if (s->is_matrix()) {
                    if (!s->cols) return Shape::matrix(nullptr, nullptr);
                    cols.push_back(s->cols);
                }
            }
            if (all_mat) return Shape::matrix(IndexSet::product(rows), IndexSet::product(cols));
            if (all_vec) return Shape::vector(IndexSet::product(rows));
            return fail(t, "tensor mixes matrix and vector factors");
        }
        case TermKind::DirectSum: {
            auto s = infer(t->kid(0));
            if (!s) return std::nullopt;
            if (!s->is_matrix()) return fail(t, "direct-sum body must be a matrix");
            if (!s->rows || !s->cols) return Shape::matrix(nullptr, nullptr);
            return Shape::matrix(set_product(t->set, s->rows), set_product(t->set, s->cols));
        }
        case TermKind::IndexedSum:
            return infer(t->kid(0));
        case TermKind::Transpose: {
            auto s = infer(t->kid(0));
            if (!s) return std::nullopt;
            if (!s->is_matrix()) return fail(t, "transpose of non-matrix " + s->str());
            return Shape::matrix(s->cols, s->rows);
        }
        case TermKind::Dagger: {
            auto s = infer(t->kid(0));
            if (!s) return std::nullopt;
            if (s->is_scalar()) return *s;
            if (s->is_matrix()) return Shape::matrix(s->cols, s->rows);
            return fail(t, "conjugate-transpose of a bare vector");
        }
        case TermKind::Inverse: {
            auto s = infer(t->kid(0));
            if (!s) return std::nullopt;
            if (s->is_scalar()) return *s; // scalar reciprocal, from the `/` sugar
            if (!s->is_matrix()) return fail(t, "inverse of non-matrix " + s->str());
            if (s->rows && s->cols && !set_eq(s->rows, s->cols))
                return fail(t, "inverse of non-square matrix " + s->str());
            return *s;
        }
        case TermKind::SubVector: {
            auto s = infer(t->kid(0));
            if (!s) return std::nullopt;
            if (!s->is_vector()) return fail(t, "sub-vector of non-vector " + s->str());
            return Shape::vector(t->set);
        }
        case TermKind::InnerProduct: {
            auto a = infer(t->kid(0));
            auto b = infer(t->kid(1));
            if (!a || !b) return std::nullopt;
            if (!a->is_vector() || !b->is_vector())
                return fail(t, "inner product of " + a->str() + " and " + b->str());
            if (!set_compat(a->rows, b->rows))
                return fail(t, "inner product over mismatched sets " + a->str() + " vs " + b->str());
            return Shape::scalar();
        }
        }
        return std::nullopt;
    }

private:
    const ShapeEnv& env_;

    std::optional<Shape> fail(const TermPtr& t, std::string msg) {
        diags.push_back(Diag{t->line, t->col, msg + " in: " + term_str(t)});
        return std::nullopt;
    }

    // Keeps the more specific sets when merging wildcard shapes.
    static Shape merge(const Shape& a, const Shape& b) {
        Shape r = a;
        if (!r.rows) r.rows = b.rows;
        if (!r.cols) r.cols = b.cols;
        return r;
    }

    std::optional<Shape> combine_mul(const TermPtr& at, const Shape& l, const Shape& r) {
        if (l.is_scalar()) return r;
        if (r.is_scalar()) return l;
        if (l.is_vector()) return fail(at, "vector on the left of a product");
        // l is a matrix
        if (r.is_vector()) {
            if (!set_compat(l.cols, r.rows))
                return fail(at, "applying " + l.str() + " to " + r.str());
            return Shape::vector(l.rows);
        }
        if (!set_compat(l.cols, r.rows))
            return fail(at, "composing " + l.str() + " with " + r.str());
        return Shape::matrix(l.rows, r.cols);
    }
};

inline std::optional<Shape> infer_shape(const TermPtr& t, const ShapeEnv& env,
                                        std::vector<Diag>* diags = nullptr) {
    ShapeInfer inf(env);
    auto s = inf.infer(t);
    if (diags)
        diags->insert(diags->end(), inf.diags.begin(), inf.diags.end());
    return s;
}

} // namespace qiral
