#pragma once
// Solver planning. A pass takes an algorithm template and rewrites every
// statement of the matched shape (x = A^-1 * b) into the template body:
// symbols bound by the match pattern come from the statement, inputs the
// pattern leaves unbound resolve against same-named globals, and locals
// get fresh names. Statements a pass introduces are not rescanned by the
// same pass, so templates whose bodies contain further inverses terminate.
//
// After the requested passes the planner inlines matrix-valued locals into
// their uses (they are closed over loop-invariant operands by construction),
// normalizes every statement under the equation set, and rejects plans that
// still contain a matrix inverse. The surviving statement list manipulates
// vectors and scalars only.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qiral/engine.hpp"
#include "qiral/match.hpp"
#include "qiral/printer.hpp"
#include "qiral/shape.hpp"
#include "qiral/source.hpp"

namespace qiral {

struct PlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The named algorithm matched no statement in the current program.
struct NoMatch : PlanError {
    using PlanError::PlanError;
};

// A template requirement could not be discharged for the matched operands.
struct RequirementUnprovable : PlanError {
    using PlanError::PlanError;
};

// An unmatched template input has no same-named global to bind to.
struct UnresolvedInput : PlanError {
    using PlanError::PlanError;
};

// The finished plan still applies a matrix inverse somewhere.
struct ResidualInverse : PlanError {
    std::vector<std::string> statements;
    ResidualInverse(const std::string& msg, std::vector<std::string> stmts)
        : PlanError(msg), statements(std::move(stmts)) {}
};

struct AlgorithmCatalog {
    std::vector<const AlgorithmTemplate*> all;

    const AlgorithmTemplate* find(const std::string& name) const {
        for (const auto* t : all)
            if (t->name == name) return t;
        return nullptr;
    }
};

inline AlgorithmCatalog load_catalog(const SourceUnit& unit) {
    AlgorithmCatalog cat;
    for (const auto& t : unit.templates) cat.all.push_back(&t);
    return cat;
}

namespace detail {

// Template symbols parse as ordinary matrix/vector/scalar symbols; turn the
// declared ones into pattern variables so matching and substitution see them.
inline TermPtr to_pattern(const TermPtr& t, const std::map<std::string, PatSort>& table) {
    if (t->kind == TermKind::MatrixSym || t->kind == TermKind::VectorSym ||
        t->kind == TermKind::SymScalar) {
        auto it = table.find(t->name);
        if (it != table.end()) return t_pat(t->name, it->second);
        return t;
    }
    return map_kids(t, [&](const TermPtr& k) { return to_pattern(k, table); });
}

inline TermPtr make_sym(const std::string& name, PatSort sort) {
    switch (sort) {
    case PatSort::Matrix: return t_mat(name);
    case PatSort::Vector: return t_vec(name);
    case PatSort::Scalar: return t_scalar(name);
    }
    throw PlanError("unrepresentable symbol sort");
}

template <class F>
StmtPtr map_stmt(const StmtPtr& s, const F& f) {
    switch (s->kind) {
    case StmtKind::Assign:
        return s_assign(f(s->lhs), f(s->rhs), s->line, s->col);
    case StmtKind::While: {
        std::vector<StmtPtr> body;
        body.reserve(s->body.size());
        for (const auto& c : s->body) body.push_back(map_stmt(c, f));
        return s_while(f(s->cond_l), s->cmp, f(s->cond_r), std::move(body), s->line, s->col);
    }
    case StmtKind::Seq: {
        std::vector<StmtPtr> body;
        body.reserve(s->body.size());
        for (const auto& c : s->body) body.push_back(map_stmt(c, f));
        return s_seq(std::move(body));
    }
    case StmtKind::Decl:
        return s;
    }
    throw PlanError("unrepresentable statement kind");
}

inline TermPtr subst_syms(const TermPtr& t, const std::map<std::string, TermPtr>& m) {
    if (t->kind == TermKind::MatrixSym) {
        auto it = m.find(t->name);
        if (it != m.end()) return it->second;
    }
    return map_kids(t, [&](const TermPtr& k) { return subst_syms(k, m); });
}

inline std::string stmt_str(const StmtPtr& s) {
    switch (s->kind) {
    case StmtKind::Assign:
        return pretty_term(s->lhs) + " = " + pretty_term(s->rhs);
    case StmtKind::While:
        return "while " + pretty_term(s->cond_l) + " " + std::string(1, s->cmp) + " " +
               pretty_term(s->cond_r);
    default:
        return "<statement>";
    }
}

} // namespace detail

struct Plan {
    std::vector<StmtPtr> stmts;
    // Shapes of every global and every planner-introduced local.
    ShapeEnv env;
};

class Planner {
public:
    Planner(const SourceUnit& unit, ShapeEnv globals)
        : unit_(unit), reg_(std::move(globals)) {}

    Plan run(const std::vector<std::string>& names) {
        if (!unit_.goal) throw PlanError("program has no solve statement");
        AlgorithmCatalog cat = load_catalog(unit_);
        std::vector<StmtPtr> program{unit_.goal};
        for (const auto& n : names) {
            const AlgorithmTemplate* t = cat.find(n);
            if (!t) throw PlanError("unknown algorithm '" + n + "'");
            int hits = 0;
            std::vector<StmtPtr> next;
            for (const auto& s : program) expand(*t, s, next, hits);
            if (hits == 0)
                throw NoMatch("algorithm '" + n + "' matches no statement in the program");
            program = std::move(next);
        }
        inline_matrix_locals(program);
        normalize_program(program);
        check_inverse_free(program);
        return Plan{std::move(program), std::move(reg_)};
    }

private:
    const SourceUnit& unit_;
    ShapeEnv reg_;
    int apps_ = 0;

    // ---- one pass ------------------------------------------------------

    void expand(const AlgorithmTemplate& t, const StmtPtr& s, std::vector<StmtPtr>& out,
                int& hits) {
        if (s->kind == StmtKind::While) {
            std::vector<StmtPtr> body;
            for (const auto& c : s->body) expand(t, c, body, hits);
            out.push_back(s_while(s->cond_l, s->cmp, s->cond_r, std::move(body), s->line, s->col));
            return;
        }
        if (s->kind == StmtKind::Seq) {
            for (const auto& c : s->body) expand(t, c, out, hits);
            return;
        }
        if (s->kind != StmtKind::Assign) {
            out.push_back(s);
            return;
        }
        auto bind = match_stmt_pattern(t, s);
        if (!bind) {
            out.push_back(s);
            return;
        }
        ++hits;
        instantiate(t, std::move(*bind), out);
    }

    std::optional<Binding> match_stmt_pattern(const AlgorithmTemplate& t, const StmtPtr& s) const {
        auto table = sym_table(t, /*with_locals=*/false);
        Matcher m(reg_);
        auto b = m.match(detail::to_pattern(t.match_stmt->lhs, table), s->lhs);
        if (!b) return std::nullopt;
        return m.match(detail::to_pattern(t.match_stmt->rhs, table), canon(s->rhs, reg_),
                       std::move(*b));
    }

    static std::map<std::string, PatSort> sym_table(const AlgorithmTemplate& t, bool with_locals) {
        std::map<std::string, PatSort> table;
        for (const auto& i : t.inputs) table[i.name] = i.sort;
        for (const auto& o : t.outputs) table[o.name] = o.sort;
        if (with_locals)
            for (const auto& l : t.locals) table[l.name] = l.sort;
        return table;
    }

    void instantiate(const AlgorithmTemplate& t, Binding bind, std::vector<StmtPtr>& out) {
        resolve_inputs(t, bind);
        discharge_requirements(t, bind);

        int app = ++apps_;
        while (suffix_taken(t, app)) app = ++apps_;
        for (const auto& l : t.locals)
            bind.terms[l.name] = detail::make_sym(l.name + "__" + std::to_string(app), l.sort);

        auto table = sym_table(t, /*with_locals=*/true);
        for (const auto& bs : t.body) {
            StmtPtr inst = detail::map_stmt(
                bs, [&](const TermPtr& term) { return bind.apply(detail::to_pattern(term, table)); });
            register_shapes(inst);
            out.push_back(inst);
        }
    }

    // Inputs the match pattern does not bind take the same-named global.
    void resolve_inputs(const AlgorithmTemplate& t, Binding& bind) const {
        for (const auto& i : t.inputs) {
            if (bind.terms.count(i.name)) continue;
            const Shape* sh = reg_.find(i.name);
            if (!sh)
                throw UnresolvedInput("algorithm '" + t.name + "': input '" + i.name +
                                      "' is not bound by the match pattern and no global of "
                                      "that name exists");
            bool ok = (i.sort == PatSort::Matrix && sh->is_matrix()) ||
                      (i.sort == PatSort::Vector && sh->is_vector()) ||
                      (i.sort == PatSort::Scalar && sh->is_scalar());
            if (!ok)
                throw UnresolvedInput("algorithm '" + t.name + "': global '" + i.name +
                                      "' has shape " + sh->str() +
                                      ", incompatible with the declared input sort");
            bind.terms[i.name] = detail::make_sym(i.name, i.sort);
        }
    }

    void discharge_requirements(const AlgorithmTemplate& t, const Binding& bind) {
        if (t.requires_.empty()) return;
        auto table = sym_table(t, /*with_locals=*/false);
        RuleEngine eng = make_engine(unit_, reg_);
        for (const auto& req : t.requires_) {
            if (req.pred != "isInvertible")
                throw PlanError("algorithm '" + t.name + "': unknown requirement predicate '" +
                                req.pred + "'");
            TermPtr arg = bind.apply(detail::to_pattern(req.arg, table));
            auto inv = eng.check_requirement(arg);
            if (!inv.proven)
                throw RequirementUnprovable("algorithm '" + t.name + "': isInvertible(" +
                                            pretty_term(arg) + ") not provable: " + inv.reason);
        }
    }

    bool suffix_taken(const AlgorithmTemplate& t, int app) const {
        for (const auto& l : t.locals)
            if (reg_.find(l.name + "__" + std::to_string(app))) return true;
        return false;
    }

    // Locals acquire shapes from their first assignment, in statement order.
    void register_shapes(const StmtPtr& s) {
        if (s->kind == StmtKind::While || s->kind == StmtKind::Seq) {
            for (const auto& c : s->body) register_shapes(c);
            return;
        }
        if (s->kind != StmtKind::Assign) return;
        const TermPtr& l = s->lhs;
        if (l->kind != TermKind::MatrixSym && l->kind != TermKind::VectorSym &&
            l->kind != TermKind::SymScalar)
            throw PlanError("assignment target is not a symbol: " + pretty_term(l));
        if (reg_.find(l->name)) return;
        auto sh = infer_shape(s->rhs, reg_);
        if (!sh)
            throw PlanError("cannot infer a shape for '" + l->name +
                            "' from: " + pretty_term(s->rhs));
        reg_.set(l->name, *sh);
    }

    // ---- finishing -------------------------------------------------------

    void inline_matrix_locals(std::vector<StmtPtr>& program) {
        std::map<std::string, TermPtr> mats;
        std::vector<StmtPtr> out;
        for (const auto& s : program) {
            StmtPtr kept = strip_matrix_assign(s, mats);
            if (kept) out.push_back(kept);
        }
        program = std::move(out);
    }

    StmtPtr strip_matrix_assign(const StmtPtr& s, std::map<std::string, TermPtr>& mats) {
        switch (s->kind) {
        case StmtKind::Assign: {
            TermPtr rhs = detail::subst_syms(s->rhs, mats);
            if (s->lhs->kind == TermKind::MatrixSym) {
                mats[s->lhs->name] = rhs;
                return nullptr;
            }
            return s_assign(s->lhs, rhs, s->line, s->col);
        }
        case StmtKind::While: {
            std::vector<StmtPtr> body;
            for (const auto& c : s->body) {
                StmtPtr kept = strip_matrix_assign(c, mats);
                if (kept) body.push_back(kept);
            }
            return s_while(detail::subst_syms(s->cond_l, mats), s->cmp,
                           detail::subst_syms(s->cond_r, mats), std::move(body), s->line, s->col);
        }
        case StmtKind::Seq: {
            std::vector<StmtPtr> body;
            for (const auto& c : s->body) {
                StmtPtr kept = strip_matrix_assign(c, mats);
                if (kept) body.push_back(kept);
            }
            return s_seq(std::move(body));
        }
        case StmtKind::Decl:
            return s;
        }
        return s;
    }

    // Inline definitions and run the equations over every statement so the
    // closed-form parity-block inverse replaces its symbolic occurrences.
    void normalize_program(std::vector<StmtPtr>& program) {
        RuleEngine eng = make_engine(unit_, reg_);
        eng.set_fuel(200000);
        for (auto& s : program)
            s = detail::map_stmt(s, [&](const TermPtr& t) { return eng.normalize(t); });
    }

    void check_inverse_free(const std::vector<StmtPtr>& program) const {
        std::vector<std::string> bad;
        for (const auto& s : program) collect_residuals(s, bad);
        if (bad.empty()) return;
        std::string msg = "plan still applies a matrix inverse:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw ResidualInverse(msg, bad);
    }

    void collect_residuals(const StmtPtr& s, std::vector<std::string>& bad) const {
        switch (s->kind) {
        case StmtKind::Assign:
            if (has_matrix_inverse(s->rhs)) bad.push_back(detail::stmt_str(s));
            return;
        case StmtKind::While:
            if (has_matrix_inverse(s->cond_l) || has_matrix_inverse(s->cond_r))
                bad.push_back(detail::stmt_str(s));
            for (const auto& c : s->body) collect_residuals(c, bad);
            return;
        case StmtKind::Seq:
            for (const auto& c : s->body) collect_residuals(c, bad);
            return;
        case StmtKind::Decl:
            return;
        }
    }

    bool has_matrix_inverse(const TermPtr& t) const {
        if (t->kind == TermKind::Inverse) {
            auto sh = infer_shape(t, reg_);
            if (!sh || !sh->is_scalar()) return true;
        }
        for (const auto& k : t->kids)
            if (has_matrix_inverse(k)) return true;
        return false;
    }
};

inline Plan plan_program(const SourceUnit& unit, const ShapeEnv& globals,
                         const std::vector<std::string>& names) {
    return Planner(unit, globals).run(names);
}

} // namespace qiral
