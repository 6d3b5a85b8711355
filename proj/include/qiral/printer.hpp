#pragma once

// Canonical text renderer for source units. parse(pretty_print(u)) yields a
// unit structurally equal to u; printing is deterministic, so golden files
// are byte-stable.
//
// Precedence levels used for parenthesization:
//   0 add/sub and binders, 1 mul/tensor, 2 unary minus, 3 postfix/atom.

#include <cstdio>
#include <sstream>
#include <string>

#include "qiral/source.hpp"

namespace qiral {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof cand, "%.*g", prec, v);
        if (std::stod(cand) == v) return cand;
    }
    return buf;
}

inline std::string set_text(const IndexSetPtr& s) {
    switch (s->kind) {
    case SetKind::Lattice: return "L";
    case SetKind::Atomic: return s->name;
    case SetKind::Direction: return "D";
    case SetKind::Parity: return std::string(parity_name(s->which)) + "(L)";
    case SetKind::Var: return s->name;
    case SetKind::Product: {
        std::string out;
        for (size_t i = 0; i < s->factors.size(); ++i) {
            if (i) out += " (x) ";
            const auto& f = s->factors[i];
            if (f->kind == SetKind::Product) out += "(" + set_text(f) + ")";
            else out += set_text(f);
        }
        return out;
    }
    }
    return "?";
}

class TermPrinter {
public:
    std::string render(const TermPtr& t, int level) {
        std::string s;
        print(t, level, s);
        return s;
    }

private:
    static void wrap(bool need, const std::string& inner, std::string& out) {
        if (need) out += "(";
        out += inner;
        if (need) out += ")";
    }

    void print(const TermPtr& t, int min_level, std::string& out) {
        switch (t->kind) {
        case TermKind::ScalarLit: {
            if (t->lit.imag() == 0.0 && t->lit.real() >= 0.0) {
                out += fmt_double(t->lit.real());
            } else {
                // engine-made literal; render as an arithmetic expression
                std::string inner;
                if (t->lit.imag() == 0.0) {
                    inner = "-" + fmt_double(-t->lit.real());
                    wrap(min_level > 2, inner, out);
                    return;
                }
                inner = fmt_double(t->lit.real()) + " + " + fmt_double(t->lit.imag()) + " * i";
                if (t->lit.imag() < 0.0)
                    inner = fmt_double(t->lit.real()) + " - " + fmt_double(-t->lit.imag()) + " * i";
                wrap(min_level > 0, inner, out);
                return;
            }
            return;
        }
        case TermKind::SymScalar:
        case TermKind::VectorSym:
        case TermKind::MatrixSym:
        case TermKind::PatVar:
            out += t->name;
            return;
        case TermKind::ImagUnit:
            out += "i";
            return;
        case TermKind::Identity: {
            const auto& s = t->set;
            if (s->kind == SetKind::Lattice) { out += "I_L"; return; }
            if (s->kind == SetKind::Atomic) { out += "I_" + s->name; return; }
            out += "I_{" + set_text(s) + "}";
            return;
        }
        case TermKind::Gamma:
            out += "gamma[" + t->dir.str() + "]";
            return;
        case TermKind::Gamma5:
            out += "gamma5";
            return;
        case TermKind::Shift:
            out += "shift(L, " + t->dir.str() + ")";
            return;
        case TermKind::GaugeLink: {
            std::string link = "U(" + t->dir.str() + ")[" + t->site + "]";
            if (t->dag) link = "dagger(" + link + ")";
            out += link;
            return;
        }
        case TermKind::Projection:
            out += std::string("proj(") + parity_name(t->parity) + ", L)";
            return;
        case TermKind::Add: {
            std::string inner = render(t->kid(0), 0);
            for (size_t i = 1; i < t->arity(); ++i) inner += " + " + render(t->kid(i), 1);
            wrap(min_level > 0, inner, out);
            return;
        }
        case TermKind::Sub: {
            std::string inner = render(t->kid(0), 0) + " - " + render(t->kid(1), 1);
            wrap(min_level > 0, inner, out);
            return;
        }
        case TermKind::Mul:
        case TermKind::ScalarMul: {
            std::string inner = render(t->kid(0), 1);
            for (size_t i = 1; i < t->arity(); ++i) inner += " * " + render(t->kid(i), 2);
            wrap(min_level > 1, inner, out);
            return;
        }
        case TermKind::Tensor: {
            std::string inner = render(t->kid(0), 1);
            for (size_t i = 1; i < t->arity(); ++i) inner += " (x) " + render(t->kid(i), 2);
            wrap(min_level > 1, inner, out);
            return;
        }
        case TermKind::Neg: {
            // operand at postfix level; `-(-A)` must not print as `--A`,
            // which would lex as a comment
            std::string inner = "-" + render(t->kid(0), 3);
            wrap(min_level > 2, inner, out);
            return;
        }
        case TermKind::DirectSum:
        case TermKind::IndexedSum: {
            std::string inner = (t->kind == TermKind::DirectSum ? "dsum " : "sum ") + t->name +
                                " in " + set_text(t->set) + " : " + render(t->kid(0), 1);
            wrap(min_level > 0, inner, out);
            return;
        }
        case TermKind::Transpose:
            out += render(t->kid(0), 3) + "^t";
            return;
        case TermKind::Inverse:
            out += render(t->kid(0), 3) + "^-1";
            return;
        case TermKind::Dagger:
            out += "dagger(" + render(t->kid(0), 0) + ")";
            return;
        case TermKind::SubVector:
            out += render(t->kid(0), 3) + "[" + set_text(t->set) + "]";
            return;
        case TermKind::InnerProduct:
            out += "<" + render(t->kid(0), 0) + " | " + render(t->kid(1), 0) + ">";
            return;
        case TermKind::Zero:
            // engine-internal; parsed source never carries a zero matrix
            out += "0";
            return;
        }
    }
};

} // namespace detail

inline std::string pretty_term(const TermPtr& t, int level = 0) {
    detail::TermPrinter p;
    return p.render(t, level);
}

inline void pretty_stmt(const StmtPtr& s, int indent, std::string& out) {
    std::string pad(size_t(indent) * 2, ' ');
    switch (s->kind) {
    case StmtKind::Assign:
        out += pad + pretty_term(s->lhs) + " = " + pretty_term(s->rhs) + " ;\n";
        return;
    case StmtKind::While:
        out += pad + "while " + pretty_term(s->cond_l, 1) + " " + s->cmp + " " +
               pretty_term(s->cond_r, 1) + " {\n";
        for (auto& b : s->body) pretty_stmt(b, indent + 1, out);
        out += pad + "}\n";
        return;
    case StmtKind::Seq:
        for (auto& b : s->body) pretty_stmt(b, indent, out);
        return;
    case StmtKind::Decl:
        return; // declarations print through their owning construct
    }
}

inline std::string pretty_print(const SourceUnit& u) {
    std::string out;
    auto sort_name = [](PatSort s) {
        return s == PatSort::Matrix ? "matrix" : s == PatSort::Vector ? "vector" : "scalar";
    };
    for (auto& d : u.decls) {
        switch (d.shape.kind) {
        case ShapeKind::Scalar:
            out += "scalar " + d.name + " ;\n";
            break;
        case ShapeKind::Vector:
            out += "vector " + d.name + " over " + detail::set_text(d.shape.rows) + " ;\n";
            break;
        case ShapeKind::Matrix:
            out += "matrix " + d.name + " over " + detail::set_text(d.shape.rows) + " , " +
                   detail::set_text(d.shape.cols) + " ;\n";
            break;
        }
    }
    if (!u.decls.empty()) out += "\n";
    for (auto& d : u.defs) out += "def " + d.name + " = " + pretty_term(d.value) + " ;\n";
    if (!u.defs.empty()) out += "\n";
    for (auto& e : u.equations) {
        out += "equation " + e.name;
        if (!e.vars.empty()) {
            out += " [";
            for (size_t i = 0; i < e.vars.size(); ++i) {
                if (i) out += ", ";
                out += e.vars[i].first + " : " + var_sort_name(e.vars[i].second);
            }
            out += "]";
        }
        out += " : " + pretty_term(e.lhs) + " = " + pretty_term(e.rhs);
        if (!e.cond_pred.empty()) out += " when " + e.cond_pred + "(" + pretty_term(e.cond_arg) + ")";
        out += " ;\n";
    }
    if (!u.equations.empty()) out += "\n";
    for (auto& a : u.templates) {
        out += "algorithm " + a.name + " {\n";
        auto list = [&](const char* kw, const std::vector<TypedSym>& syms) {
            if (syms.empty()) return;
            out += std::string("  ") + kw + " ";
            for (size_t i = 0; i < syms.size(); ++i) {
                if (i) out += ", ";
                out += syms[i].name + " : " + sort_name(syms[i].sort);
            }
            out += " ;\n";
        };
        list("input", a.inputs);
        list("output", a.outputs);
        out += "  match " + pretty_term(a.match_stmt->lhs) + " = " +
               pretty_term(a.match_stmt->rhs) + " ;\n";
        for (auto& r : a.requires_)
            out += "  require " + r.pred + "(" + pretty_term(r.arg) + ") ;\n";
        list("var", a.locals);
        out += "  body {\n";
        for (auto& s : a.body) pretty_stmt(s, 2, out);
        out += "  }\n}\n\n";
    }
    if (u.goal)
        out += "solve " + pretty_term(u.goal->lhs) + " = " + pretty_term(u.goal->rhs) + " ;\n";
    return out;
}

} // namespace qiral
