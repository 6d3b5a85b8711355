#pragma once

// Whole-unit semantic checking: binds declaration shapes, infers definition
// shapes, and verifies every equation, template and the goal. All errors are
// accumulated with source locations; nothing stops at the first failure.

#include <string>
#include <vector>

#include "qiral/printer.hpp"
#include "qiral/source.hpp"

namespace qiral {

struct CheckResult {
    ShapeEnv env; // declarations plus inferred definition shapes
    std::vector<Diag> diags;
    bool ok() const { return diags.empty(); }
};

inline Shape wildcard_of(PatSort s) {
    switch (s) {
    case PatSort::Matrix: return Shape::matrix(nullptr, nullptr);
    case PatSort::Vector: return Shape::vector(nullptr);
    case PatSort::Scalar: return Shape::scalar();
    }
    return Shape::scalar();
}

inline void check_assign(const StmtPtr& s, const ShapeEnv& env, std::vector<Diag>& diags) {
    auto ls = infer_shape(s->lhs, env, &diags);
    auto rs = infer_shape(s->rhs, env, &diags);
    if (!ls || !rs) return;
    if (rs->is_scalar() && is_zero(s->rhs)) return; // `x = 0` zero-fills any shape
    if (!shape_compat(*ls, *rs))
        diags.push_back({s->line, s->col,
                         "assignment to " + pretty_term(s->lhs) + " of shape " + ls->str() +
                             " from incompatible " + rs->str()});
}

inline void check_stmt(const StmtPtr& s, const ShapeEnv& env, std::vector<Diag>& diags) {
    switch (s->kind) {
    case StmtKind::Assign:
        check_assign(s, env, diags);
        return;
    case StmtKind::While: {
        auto ls = infer_shape(s->cond_l, env, &diags);
        auto rs = infer_shape(s->cond_r, env, &diags);
        if (ls && !ls->is_scalar())
            diags.push_back({s->line, s->col, "while condition compares non-scalar " + ls->str()});
        if (rs && !rs->is_scalar())
            diags.push_back({s->line, s->col, "while condition compares non-scalar " + rs->str()});
        for (auto& b : s->body) check_stmt(b, env, diags);
        return;
    }
    case StmtKind::Seq:
        for (auto& b : s->body) check_stmt(b, env, diags);
        return;
    case StmtKind::Decl:
        return;
    }
}

inline CheckResult typecheck_program(const SourceUnit& u) {
    CheckResult r;
    for (auto& d : u.decls) r.env.set(d.name, d.shape);

    for (auto& d : u.defs) {
        std::vector<Diag> local;
        auto s = infer_shape(d.value, r.env, &local);
        for (auto& diag : local) {
            if (diag.line == 0) { diag.line = d.line; diag.col = d.col; }
            r.diags.push_back(diag);
        }
        if (s) {
            r.env.set(d.name, *s);
        } else {
            // keep later references resolvable so one bad def yields one error
            r.env.set(d.name, Shape::matrix(nullptr, nullptr));
        }
    }

    for (auto& e : u.equations) {
        ShapeEnv env = r.env;
        for (auto& [name, sort] : e.vars) {
            switch (sort) {
            case VarSort::Matrix: env.set(name, Shape::matrix(nullptr, nullptr)); break;
            case VarSort::Vector: env.set(name, Shape::vector(nullptr)); break;
            case VarSort::Scalar: env.set(name, Shape::scalar()); break;
            case VarSort::Dir: break;  // bound inside direction slots only
            case VarSort::Set: break;  // bound inside index-set slots only
            }
        }
        auto ls = infer_shape(e.lhs, env, &r.diags);
        auto rs = infer_shape(e.rhs, env, &r.diags);
        if (ls && rs && !shape_compat(*ls, *rs))
            r.diags.push_back({e.line, e.col,
                               "equation '" + e.name + "' relates " + ls->str() + " to " +
                                   rs->str()});
        if (e.cond_arg) {
            auto cs = infer_shape(e.cond_arg, env, &r.diags);
            // conformable() inspects a matrix product; the other predicates
            // take scalars.
            if (cs && !cs->is_scalar() && e.cond_pred != "conformable")
                r.diags.push_back({e.line, e.col,
                                   "equation '" + e.name + "' condition is not scalar"});
        }
    }

    for (auto& a : u.templates) {
        ShapeEnv env = r.env;
        for (auto& s : a.inputs) env.set(s.name, wildcard_of(s.sort));
        for (auto& s : a.outputs) env.set(s.name, wildcard_of(s.sort));
        for (auto& s : a.locals) env.set(s.name, wildcard_of(s.sort));
        if (a.match_stmt) check_assign(a.match_stmt, env, r.diags);
        for (auto& req : a.requires_) {
            auto s = infer_shape(req.arg, env, &r.diags);
            if (s && req.pred == "isInvertible") {
                if (!s->is_matrix() || !set_compat(s->rows, s->cols))
                    r.diags.push_back({a.line, a.col,
                                       "requirement isInvertible needs a square matrix, got " +
                                           s->str()});
            }
        }
        for (auto& st : a.body) check_stmt(st, env, r.diags);
    }

    if (u.goal) check_stmt(u.goal, r.env, r.diags);
    return r;
}

} // namespace qiral
