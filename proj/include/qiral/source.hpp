#pragma once

// Surface program structure: declarations, operator definitions, equations,
// algorithm templates and the goal statement, as parsed from .qir text.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qiral/shape.hpp"
#include "qiral/term.hpp"

namespace qiral {

enum class StmtKind { Assign, While, Seq, Decl };

struct Statement;
using StmtPtr = std::shared_ptr<const Statement>;

struct Statement {
    StmtKind kind = StmtKind::Seq;
    // Assign
    TermPtr lhs, rhs;
    // While: cond_l cmp cond_r, cmp in {'>', '<'}
    TermPtr cond_l, cond_r;
    char cmp = '>';
    // While / Seq
    std::vector<StmtPtr> body;
    // Decl
    std::vector<std::pair<std::string, PatSort>> decls;
    int line = 0, col = 0;
};

inline StmtPtr s_assign(TermPtr lhs, TermPtr rhs, int line = 0, int col = 0) {
    auto s = std::make_shared<Statement>();
    s->kind = StmtKind::Assign;
    s->lhs = std::move(lhs);
    s->rhs = std::move(rhs);
    s->line = line;
    s->col = col;
    return s;
}

inline StmtPtr s_while(TermPtr l, char cmp, TermPtr r, std::vector<StmtPtr> body, int line = 0,
                       int col = 0) {
    auto s = std::make_shared<Statement>();
    s->kind = StmtKind::While;
    s->cond_l = std::move(l);
    s->cmp = cmp;
    s->cond_r = std::move(r);
    s->body = std::move(body);
    s->line = line;
    s->col = col;
    return s;
}

inline StmtPtr s_seq(std::vector<StmtPtr> body) {
    auto s = std::make_shared<Statement>();
    s->kind = StmtKind::Seq;
    s->body = std::move(body);
    return s;
}

inline bool stmt_eq(const StmtPtr& a, const StmtPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case StmtKind::Assign:
        return term_eq(a->lhs, b->lhs) && term_eq(a->rhs, b->rhs);
    case StmtKind::While:
        if (a->cmp != b->cmp || !term_eq(a->cond_l, b->cond_l) || !term_eq(a->cond_r, b->cond_r))
            return false;
        break;
    case StmtKind::Seq:
        break;
    case StmtKind::Decl:
        return a->decls == b->decls;
    }
    if (a->body.size() != b->body.size()) return false;
    for (size_t i = 0; i < a->body.size(); ++i)
        if (!stmt_eq(a->body[i], b->body[i])) return false;
    return true;
}

// Sorts a surface variable can be declared with; `dir` names a lattice
// direction and only appears inside gamma[.], U(.), shift(.,.); `set`
// variables stand for index sets inside I_{...} and friends.
enum class VarSort { Matrix, Vector, Scalar, Dir, Set };

inline const char* var_sort_name(VarSort s) {
    switch (s) {
    case VarSort::Matrix: return "matrix";
    case VarSort::Vector: return "vector";
    case VarSort::Scalar: return "scalar";
    case VarSort::Dir: return "dir";
    case VarSort::Set: return "set";
    }
    return "?";
}

struct TypedSym {
    std::string name;
    PatSort sort = PatSort::Matrix;
    bool operator==(const TypedSym& o) const { return name == o.name && sort == o.sort; }
};

struct Requirement {
    std::string pred; // e.g. isInvertible
    TermPtr arg;
    bool operator==(const Requirement& o) const { return pred == o.pred && term_eq(arg, o.arg); }
};

struct Def {
    std::string name;
    TermPtr value;
    int line = 0, col = 0;
};

struct Equation {
    std::string name;
    std::vector<std::pair<std::string, VarSort>> vars;
    TermPtr lhs, rhs;
    std::string cond_pred; // empty when unconditional
    TermPtr cond_arg;
    int line = 0, col = 0;
};

struct AlgorithmTemplate {
    std::string name;
    std::vector<TypedSym> inputs, outputs, locals;
    StmtPtr match_stmt; // always an Assign pattern
    std::vector<Requirement> requires_;
    std::vector<StmtPtr> body;
    int line = 0, col = 0;
};

struct DeclItem {
    std::string name;
    Shape shape;
    int line = 0, col = 0;
};

struct SourceUnit {
    std::vector<DeclItem> decls;
    std::vector<Def> defs;
    std::vector<Equation> equations;
    std::vector<AlgorithmTemplate> templates;
    StmtPtr goal; // null when absent

    const Def* find_def(const std::string& n) const {
        for (auto& d : defs)
            if (d.name == n) return &d;
        return nullptr;
    }
    const AlgorithmTemplate* find_template(const std::string& n) const {
        for (auto& t : templates)
            if (t.name == n) return &t;
        return nullptr;
    }
};

inline bool shape_exact_eq(const Shape& a, const Shape& b) {
    if (a.kind != b.kind) return false;
    auto same = [](const IndexSetPtr& x, const IndexSetPtr& y) {
        if (!x && !y) return true;
        if (!x || !y) return false;
        return set_eq(x, y);
    };
    return same(a.rows, b.rows) && same(a.cols, b.cols);
}

inline bool unit_eq(const SourceUnit& a, const SourceUnit& b) {
    if (a.decls.size() != b.decls.size() || a.defs.size() != b.defs.size() ||
        a.equations.size() != b.equations.size() || a.templates.size() != b.templates.size())
        return false;
    for (size_t i = 0; i < a.decls.size(); ++i)
        if (a.decls[i].name != b.decls[i].name || !shape_exact_eq(a.decls[i].shape, b.decls[i].shape))
            return false;
    for (size_t i = 0; i < a.defs.size(); ++i)
        if (a.defs[i].name != b.defs[i].name || !term_eq(a.defs[i].value, b.defs[i].value))
            return false;
    for (size_t i = 0; i < a.equations.size(); ++i) {
        const auto &x = a.equations[i], &y = b.equations[i];
        if (x.name != y.name || x.vars != y.vars || !term_eq(x.lhs, y.lhs) ||
            !term_eq(x.rhs, y.rhs) || x.cond_pred != y.cond_pred)
            return false;
        if ((x.cond_arg == nullptr) != (y.cond_arg == nullptr)) return false;
        if (x.cond_arg && !term_eq(x.cond_arg, y.cond_arg)) return false;
    }
    for (size_t i = 0; i < a.templates.size(); ++i) {
        const auto &x = a.templates[i], &y = b.templates[i];
        if (x.name != y.name || x.inputs != y.inputs || x.outputs != y.outputs ||
            x.locals != y.locals || x.requires_ != y.requires_)
            return false;
        if (!stmt_eq(x.match_stmt, y.match_stmt)) return false;
        if (x.body.size() != y.body.size()) return false;
        for (size_t j = 0; j < x.body.size(); ++j)
            if (!stmt_eq(x.body[j], y.body[j])) return false;
    }
    if ((a.goal == nullptr) != (b.goal == nullptr)) return false;
    if (a.goal && !stmt_eq(a.goal, b.goal)) return false;
    return true;
}

} // namespace qiral
