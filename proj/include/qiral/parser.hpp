#pragma once

// Recursive-descent parser for .qir source. Identifier resolution is
// declaration-driven: every symbol must be declared (top-level decl/def,
// equation variable list, template input/output/var, or a binder) before
// use, so the parser can pick the right term node without type feedback.
//
// Precedence: postfix (^t, ^-1, [set]) > unary - > * / (x) > + - ;
// `*`, `/` and `(x)` share one left-associative level. `dsum`/`sum` binder
// bodies extend over one `*`-level expression.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qiral/lexer.hpp"
#include "qiral/source.hpp"

namespace qiral {

struct ParseOptions {
    std::array<int, 4> lattice = {2, 2, 2, 2};
};

struct ParseResult {
    SourceUnit unit;
    std::vector<Diag> errors;
    bool ok() const { return errors.empty(); }
};

class Parser {
public:
    Parser(const std::string& text, ParseOptions opt) : opt_(opt) {
        Lexer lex(text);
        toks_ = lex.run(errors_);
    }

    ParseResult run() {
        static const char* item_starts[] = {"vector", "matrix", "scalar", "def",
                                            "equation", "algorithm", "solve"};
        while (!at_end()) {
            try {
                const Token& t = peek();
                if (t.kind != Tok::Ident) {
                    fail(t, "expected a top-level item");
                }
                bool known = false;
                for (auto* k : item_starts) known |= (t.text == k);
                if (!known) fail(t, "unknown top-level keyword '" + t.text + "'");
                if (t.text == "vector" || t.text == "matrix" || t.text == "scalar")
                    parse_decl();
                else if (t.text == "def")
                    parse_def();
                else if (t.text == "equation")
                    parse_equation();
                else if (t.text == "algorithm")
                    parse_algorithm();
                else
                    parse_goal();
            } catch (const Bail&) {
                sync_toplevel();
            }
        }
        return ParseResult{std::move(unit_), std::move(errors_)};
    }

private:
    struct Bail {};

    enum class SymK {
        Matrix, Vector, Scalar, PatMatrix, PatVector, PatScalar, DirVar, SiteVar, SetVar
    };

    ParseOptions opt_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::vector<Diag> errors_;
    SourceUnit unit_;
    std::vector<std::map<std::string, SymK>> scopes_{{}};

    static bool reserved(const std::string& id) {
        static const char* words[] = {"def", "equation", "algorithm", "input", "output", "match",
                                      "require", "var", "body", "while", "solve", "vector",
                                      "matrix", "scalar", "over", "in", "when", "sum", "dsum",
                                      "dagger", "proj", "even", "odd", "gamma", "gamma5", "U",
                                      "i", "L", "C", "S", "D", "dir", "set"};
        for (auto* w : words)
            if (id == w) return true;
        return false;
    }

    // ---- token plumbing ----

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() {
        const Token& t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Tok::End; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
    bool eat(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }
    bool eat_word(const char* w) {
        if (!at_word(w)) return false;
        take();
        return true;
    }
    const Token& expect(Tok k, const char* what) {
        if (!at(k)) fail(peek(), std::string("expected ") + what);
        return take();
    }
    void expect_word(const char* w) {
        if (!at_word(w)) fail(peek(), std::string("expected '") + w + "'");
        take();
    }
    [[noreturn]] void fail(const Token& t, std::string msg) {
        errors_.push_back({t.line, t.col, std::move(msg)});
        throw Bail{};
    }
    void sync_toplevel() {
        int depth = 0;
        while (!at_end()) {
            const Token& t = peek();
            if (t.kind == Tok::LBrace) ++depth;
            if (t.kind == Tok::RBrace && depth > 0) --depth;
            else if (t.kind == Tok::RBrace || (t.kind == Tok::Semi && depth == 0)) {
                take();
                if (depth <= 0) return;
                continue;
            }
            if (depth == 0 && t.kind == Tok::Ident &&
                (t.text == "vector" || t.text == "matrix" || t.text == "scalar" ||
                 t.text == "def" || t.text == "equation" || t.text == "algorithm" ||
                 t.text == "solve"))
                return;
            take();
        }
    }

    // ---- scopes ----

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }
    void declare(const Token& at_tok, const std::string& name, SymK k) {
        if (reserved(name)) fail(at_tok, "'" + name + "' is a reserved word");
        auto& top = scopes_.back();
        if (top.count(name)) fail(at_tok, "duplicate symbol '" + name + "'");
        top[name] = k;
    }
    const SymK* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    // ---- index sets ----

    IndexSetPtr lattice_set() const { return IndexSet::lattice(opt_.lattice); }

    IndexSetPtr parse_set_primary() {
        const Token& t = peek();
        if (eat(Tok::LParen)) {
            auto s = parse_set();
            expect(Tok::RParen, "')' in set expression");
            return s;
        }
        if (t.kind != Tok::Ident) fail(t, "expected an index set");
        if (eat_word("L")) return lattice_set();
        if (eat_word("C")) return color_set();
        if (eat_word("S")) return spin_set();
        if (eat_word("D")) return IndexSet::direction();
        if (at_word("even") || at_word("odd")) {
            Parity p = take().text == "even" ? Parity::Even : Parity::Odd;
            expect(Tok::LParen, "'(' after parity");
            expect_word("L");
            expect(Tok::RParen, "')' after parity set");
            return IndexSet::parity_half(opt_.lattice, p);
        }
        if (const SymK* k = lookup(t.text); k && *k == SymK::SetVar) {
            take();
            return IndexSet::set_var(t.text);
        }
        fail(t, "unknown index set '" + t.text + "'");
    }

    IndexSetPtr parse_set() {
        std::vector<IndexSetPtr> fs{parse_set_primary()};
        while (eat(Tok::TensorOp)) fs.push_back(parse_set_primary());
        return IndexSet::product(std::move(fs));
    }

    bool starts_set(const Token& t) const {
        if (t.kind == Tok::LParen) return true;
        if (t.kind != Tok::Ident) return false;
        if (t.text == "L" || t.text == "C" || t.text == "S" || t.text == "D" ||
            t.text == "even" || t.text == "odd")
            return true;
        const SymK* k = lookup(t.text);
        return k && *k == SymK::SetVar;
    }

    // ---- directions ----

    Dir parse_dir() {
        bool neg = eat(Tok::Minus);
        const Token& t = expect(Tok::Ident, "a direction");
        if (t.text == "x") return Dir::lit(0, neg);
        if (t.text == "y") return Dir::lit(1, neg);
        if (t.text == "z") return Dir::lit(2, neg);
        if (t.text == "t") return Dir::lit(3, neg);
        const SymK* k = lookup(t.text);
        if (!k || *k != SymK::DirVar)
            fail(t, "'" + t.text + "' is not a direction (x, y, z, t or a bound variable)");
        return Dir::of_var(t.text, neg);
    }

    // ---- terms ----

    TermPtr located(TermPtr t, const Token& tok) {
        auto* m = const_cast<Term*>(t.get());
        if (m->line == 0) {
            m->line = tok.line;
            m->col = tok.col;
        }
        return t;
    }

    TermPtr parse_expr() { return parse_add(); }

    TermPtr parse_add() {
        TermPtr acc = parse_mul();
        while (true) {
            const Token& t = peek();
            if (eat(Tok::Plus))
                acc = located(t_add(acc, parse_mul()), t);
            else if (eat(Tok::Minus))
                acc = located(t_sub(acc, parse_mul()), t);
            else
                return acc;
        }
    }

    TermPtr parse_mul() {
        TermPtr acc = parse_unary();
        while (true) {
            const Token& t = peek();
            if (eat(Tok::Star))
                acc = located(t_mul(acc, parse_unary()), t);
            else if (eat(Tok::TensorOp))
                acc = located(t_tensor(acc, parse_unary()), t);
            else if (eat(Tok::Slash))
                acc = located(t_mul(acc, t_inverse(parse_unary())), t);
            else
                return acc;
        }
    }

    TermPtr parse_unary() {
        const Token& t = peek();
        if (eat(Tok::Minus)) return located(t_neg(parse_unary()), t);
        return parse_postfix();
    }

    TermPtr parse_postfix() {
        TermPtr acc = parse_primary();
        while (true) {
            const Token& t = peek();
            if (eat(Tok::CaretT))
                acc = located(t_transpose(acc), t);
            else if (eat(Tok::CaretInv))
                acc = located(t_inverse(acc), t);
            else if (at(Tok::LBracket) && starts_set(peek(1))) {
                take();
                auto s = parse_set();
                expect(Tok::RBracket, "']' after sub-vector set");
                acc = located(t_subvector(acc, s), t);
            } else {
                return acc;
            }
        }
    }

    TermPtr parse_binder(bool direct_sum) {
        const Token& name = expect(Tok::Ident, "a binder name");
        expect_word("in");
        auto dom = parse_set();
        expect(Tok::Colon, "':' after binder domain");
        push_scope();
        bool is_dir = dom->kind == SetKind::Direction;
        declare(name, name.text, is_dir ? SymK::DirVar : SymK::SiteVar);
        TermPtr body = parse_mul();
        pop_scope();
        if (direct_sum) {
            if (is_dir) fail(name, "direct sum over directions is not supported");
            return t_dsum(name.text, dom, body);
        }
        return t_isum(name.text, dom, body);
    }

    TermPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Number: {
            take();
            return located(t_lit(t.num), t);
        }
        case Tok::LParen: {
            take();
            TermPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Less: {
            take();
            TermPtr a = parse_expr();
            expect(Tok::Pipe, "'|' in inner product");
            TermPtr b = parse_expr();
            expect(Tok::Greater, "'>' closing inner product");
            return located(t_inner(a, b), t);
        }
        case Tok::IdentityBrace: {
            take();
            auto s = parse_set();
            expect(Tok::RBrace, "'}' closing I_{...}");
            return located(t_identity(s), t);
        }
        case Tok::Ident:
            break;
        default:
            fail(t, "expected an expression");
        }

        take();
        const std::string& id = t.text;
        if (id == "i") return located(t_imag(), t);
        if (id == "gamma5") return located(t_gamma5(), t);
        if (id == "gamma") {
            expect(Tok::LBracket, "'[' after gamma");
            Dir d = parse_dir();
            expect(Tok::RBracket, "']' after gamma direction");
            return located(t_gamma(d), t);
        }
        if (id == "U") {
            Dir d;
            if (eat(Tok::TensorOp)) {
                d = Dir::lit(0); // "U(x)": the lexer saw the tensor token "(x)"
            } else {
                expect(Tok::LParen, "'(' after U");
                d = parse_dir();
                expect(Tok::RParen, "')' after link direction");
            }
            expect(Tok::LBracket, "'[' before link site");
            const Token& site = expect(Tok::Ident, "a site variable");
            const SymK* k = lookup(site.text);
            if (!k || *k != SymK::SiteVar)
                fail(site, "'" + site.text + "' is not a bound site variable");
            expect(Tok::RBracket, "']' after link site");
            return located(t_link(d, site.text), t);
        }
        if (id == "shift") {
            expect(Tok::LParen, "'(' after shift");
            auto s = parse_set();
            if (s->kind != SetKind::Lattice) fail(t, "shift domain must be the lattice");
            expect(Tok::Comma, "',' in shift");
            Dir d = parse_dir();
            expect(Tok::RParen, "')' after shift");
            return located(t_shift(s, d), t);
        }
        if (id == "proj") {
            expect(Tok::LParen, "'(' after proj");
            const Token& p = expect(Tok::Ident, "'even' or 'odd'");
            if (p.text != "even" && p.text != "odd") fail(p, "expected 'even' or 'odd'");
            expect(Tok::Comma, "',' in proj");
            auto s = parse_set();
            if (s->kind != SetKind::Lattice) fail(t, "proj domain must be the lattice");
            expect(Tok::RParen, "')' after proj");
            return located(t_proj(p.text == "even" ? Parity::Even : Parity::Odd, s), t);
        }
        if (id == "dagger") {
            expect(Tok::LParen, "'(' after dagger");
            TermPtr a = parse_expr();
            expect(Tok::RParen, "')' after dagger");
            return located(t_dagger(a), t);
        }
        if (id == "dsum") return located(parse_binder(true), t);
        if (id == "sum") return located(parse_binder(false), t);
        if (id.rfind("I_", 0) == 0 && id.size() > 2) {
            std::string suffix = id.substr(2);
            IndexSetPtr s;
            if (suffix == "L") s = lattice_set();
            else if (suffix == "C") s = color_set();
            else if (suffix == "S") s = spin_set();
            else fail(t, "unknown identity set '" + suffix + "'");
            return located(t_identity(s), t);
        }

        const SymK* k = lookup(id);
        if (!k) fail(t, "undeclared symbol '" + id + "'");
        switch (*k) {
        case SymK::Matrix: return located(t_mat(id), t);
        case SymK::Vector: return located(t_vec(id), t);
        case SymK::Scalar: return located(t_scalar(id), t);
        case SymK::PatMatrix: return located(t_pat(id, PatSort::Matrix), t);
        case SymK::PatVector: return located(t_pat(id, PatSort::Vector), t);
        case SymK::PatScalar: return located(t_pat(id, PatSort::Scalar), t);
        case SymK::DirVar: fail(t, "direction variable '" + id + "' used as a term");
        case SymK::SiteVar: fail(t, "site variable '" + id + "' used as a term");
        case SymK::SetVar: fail(t, "set variable '" + id + "' used as a term");
        }
        fail(t, "unresolvable symbol '" + id + "'");
    }

    // ---- statements ----

    StmtPtr parse_stmt() {
        const Token& t = peek();
        if (eat_word("while")) {
            TermPtr l = parse_expr();
            char cmp;
            if (eat(Tok::Greater)) cmp = '>';
            else if (eat(Tok::Less)) cmp = '<';
            else fail(peek(), "expected '>' or '<' in while condition");
            TermPtr r = parse_expr();
            expect(Tok::LBrace, "'{' opening while body");
            std::vector<StmtPtr> body;
            while (!at(Tok::RBrace)) body.push_back(parse_stmt());
            expect(Tok::RBrace, "'}' closing while body");
            return s_while(l, cmp, r, std::move(body), t.line, t.col);
        }
        const Token& name = expect(Tok::Ident, "a statement");
        TermPtr lhs = resolve_lhs(name);
        expect(Tok::Equals, "'=' in assignment");
        TermPtr rhs = parse_expr();
        expect(Tok::Semi, "';' after assignment");
        return s_assign(lhs, rhs, t.line, t.col);
    }

    TermPtr resolve_lhs(const Token& name) {
        const SymK* k = lookup(name.text);
        if (!k) fail(name, "undeclared symbol '" + name.text + "'");
        switch (*k) {
        case SymK::Matrix: return located(t_mat(name.text), name);
        case SymK::Vector: return located(t_vec(name.text), name);
        case SymK::Scalar: return located(t_scalar(name.text), name);
        default: fail(name, "'" + name.text + "' cannot be assigned");
        }
    }

    // ---- top-level items ----

    void parse_decl() {
        const Token& kw = take(); // vector | matrix | scalar
        const Token& name = expect(Tok::Ident, "a name");
        DeclItem d;
        d.name = name.text;
        d.line = name.line;
        d.col = name.col;
        if (kw.text == "scalar") {
            d.shape = Shape::scalar();
        } else if (kw.text == "vector") {
            expect_word("over");
            d.shape = Shape::vector(parse_set());
        } else {
            expect_word("over");
            auto rows = parse_set();
            expect(Tok::Comma, "',' between row and column sets");
            auto cols = parse_set();
            d.shape = Shape::matrix(rows, cols);
        }
        expect(Tok::Semi, "';' after declaration");
        declare(name, d.name,
                kw.text == "scalar" ? SymK::Scalar
                                    : kw.text == "vector" ? SymK::Vector : SymK::Matrix);
        unit_.decls.push_back(std::move(d));
    }

    void parse_def() {
        take(); // def
        const Token& name = expect(Tok::Ident, "a definition name");
        expect(Tok::Equals, "'=' in definition");
        // the name is visible inside its own body only through prior defs;
        // recursion is not a thing here
        TermPtr v = parse_expr();
        expect(Tok::Semi, "';' after definition");
        declare(name, name.text, SymK::Matrix);
        unit_.defs.push_back(Def{name.text, v, name.line, name.col});
    }

    VarSort parse_var_sort() {
        const Token& s = expect(Tok::Ident, "a sort (matrix, vector, scalar, dir, set)");
        if (s.text == "matrix") return VarSort::Matrix;
        if (s.text == "vector") return VarSort::Vector;
        if (s.text == "scalar") return VarSort::Scalar;
        if (s.text == "dir") return VarSort::Dir;
        if (s.text == "set") return VarSort::Set;
        fail(s, "unknown sort '" + s.text + "'");
    }

    void parse_equation() {
        take(); // equation
        const Token& name = expect(Tok::Ident, "an equation name");
        for (auto& e : unit_.equations)
            if (e.name == name.text) fail(name, "duplicate equation '" + name.text + "'");
        Equation eq;
        eq.name = name.text;
        eq.line = name.line;
        eq.col = name.col;
        push_scope();
        if (eat(Tok::LBracket)) {
            while (!at(Tok::RBracket)) {
                const Token& vn = expect(Tok::Ident, "a variable name");
                expect(Tok::Colon, "':' in variable list");
                VarSort vs = parse_var_sort();
                SymK k = vs == VarSort::Matrix   ? SymK::PatMatrix
                         : vs == VarSort::Vector ? SymK::PatVector
                         : vs == VarSort::Scalar ? SymK::PatScalar
                         : vs == VarSort::Dir    ? SymK::DirVar
                                                 : SymK::SetVar;
                declare(vn, vn.text, k);
                eq.vars.emplace_back(vn.text, vs);
                if (!eat(Tok::Comma)) break;
            }
            expect(Tok::RBracket, "']' closing variable list");
        }
        expect(Tok::Colon, "':' before equation body");
        eq.lhs = parse_expr();
        expect(Tok::Equals, "'=' in equation");
        eq.rhs = parse_expr();
        if (eat_word("when")) {
            const Token& p = expect(Tok::Ident, "a condition predicate");
            eq.cond_pred = p.text;
            expect(Tok::LParen, "'(' after condition predicate");
            eq.cond_arg = parse_expr();
            expect(Tok::RParen, "')' after condition");
        }
        expect(Tok::Semi, "';' after equation");
        pop_scope();
        unit_.equations.push_back(std::move(eq));
    }

    void parse_typed_list(std::vector<TypedSym>& out) {
        while (true) {
            const Token& vn = expect(Tok::Ident, "a symbol name");
            expect(Tok::Colon, "':' in symbol list");
            VarSort vs = parse_var_sort();
            if (vs == VarSort::Dir || vs == VarSort::Set)
                fail(vn, "template symbols must be matrix, vector or scalar");
            PatSort ps = vs == VarSort::Matrix   ? PatSort::Matrix
                         : vs == VarSort::Vector ? PatSort::Vector
                                                 : PatSort::Scalar;
            SymK k = vs == VarSort::Matrix   ? SymK::Matrix
                     : vs == VarSort::Vector ? SymK::Vector
                                             : SymK::Scalar;
            declare(vn, vn.text, k);
            out.push_back(TypedSym{vn.text, ps});
            if (!eat(Tok::Comma)) break;
        }
        expect(Tok::Semi, "';' after symbol list");
    }

    void parse_algorithm() {
        take(); // algorithm
        const Token& name = expect(Tok::Ident, "an algorithm name");
        for (auto& t : unit_.templates)
            if (t.name == name.text) fail(name, "duplicate algorithm '" + name.text + "'");
        AlgorithmTemplate alg;
        alg.name = name.text;
        alg.line = name.line;
        alg.col = name.col;
        expect(Tok::LBrace, "'{' opening algorithm");
        push_scope();
        bool saw_body = false;
        while (!at(Tok::RBrace)) {
            if (eat_word("input")) {
                parse_typed_list(alg.inputs);
            } else if (eat_word("output")) {
                parse_typed_list(alg.outputs);
            } else if (eat_word("var")) {
                parse_typed_list(alg.locals);
            } else if (eat_word("match")) {
                if (alg.match_stmt) fail(peek(), "duplicate match clause");
                const Token& lhs = expect(Tok::Ident, "match pattern lhs");
                TermPtr l = resolve_lhs(lhs);
                expect(Tok::Equals, "'=' in match pattern");
                TermPtr r = parse_expr();
                expect(Tok::Semi, "';' after match pattern");
                alg.match_stmt = s_assign(l, r, lhs.line, lhs.col);
            } else if (eat_word("require")) {
                const Token& p = expect(Tok::Ident, "a requirement predicate");
                expect(Tok::LParen, "'(' after requirement predicate");
                TermPtr arg = parse_expr();
                expect(Tok::RParen, "')' after requirement");
                expect(Tok::Semi, "';' after requirement");
                alg.requires_.push_back(Requirement{p.text, arg});
            } else if (eat_word("body")) {
                expect(Tok::LBrace, "'{' opening body");
                while (!at(Tok::RBrace)) alg.body.push_back(parse_stmt());
                expect(Tok::RBrace, "'}' closing body");
                saw_body = true;
            } else {
                fail(peek(), "expected an algorithm section");
            }
        }
        expect(Tok::RBrace, "'}' closing algorithm");
        pop_scope();
        if (!alg.match_stmt) {
            errors_.push_back({alg.line, alg.col, "algorithm '" + alg.name + "' has no match clause"});
            return;
        }
        if (!saw_body)
            errors_.push_back({alg.line, alg.col, "algorithm '" + alg.name + "' has no body"});
        unit_.templates.push_back(std::move(alg));
    }

    void parse_goal() {
        const Token& kw = take(); // solve
        if (unit_.goal) fail(kw, "duplicate solve statement");
        const Token& lhs = expect(Tok::Ident, "goal lhs");
        TermPtr l = resolve_lhs(lhs);
        expect(Tok::Equals, "'=' in goal");
        TermPtr r = parse_expr();
        expect(Tok::Semi, "';' after goal");
        unit_.goal = s_assign(l, r, kw.line, kw.col);
    }
};

inline ParseResult parse_unit(const std::string& text, ParseOptions opt = {}) {
    Parser p(text, opt);
    return p.run();
}

} // namespace qiral
