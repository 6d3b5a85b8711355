#pragma once
// The rewrite engine: named rules (syntactic equations plus a few
// procedural rules that need shape arithmetic), leftmost-innermost
// normalization under a rewrite budget, symbolic rule conditions, and the
// invertibility prover behind algorithm requirements.
//
// Definitions are inlined before rewriting, every intermediate is kept
// canonical, and each productive step burns one unit of fuel so cyclic
// rule sets fail loudly instead of hanging.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qiral/canon.hpp"
#include "qiral/match.hpp"
#include "qiral/printer.hpp"
#include "qiral/source.hpp"

namespace qiral {

class FuelExhausted : public std::runtime_error {
public:
    explicit FuelExhausted(long limit)
        : std::runtime_error("rewrite budget of " + std::to_string(limit) +
                             " steps exhausted; rule set is likely cyclic") {}
};

struct TraceEntry {
    std::string rule;
    std::string before;
    std::string after;
};

class RuleEngine;

struct RewriteRule {
    std::string name;
    TermPtr lhs, rhs; // syntactic rules
    std::string cond_pred;
    TermPtr cond_arg;
    // procedural rules return a replacement or null
    std::function<TermPtr(const TermPtr&, const RuleEngine&)> proc;

    bool procedural() const { return bool(proc); }
};

namespace detail {

inline void collect_pat_vars(const TermPtr& t, std::set<std::string>& terms,
                             std::set<std::string>& dirs, std::set<std::string>& sets) {
    for_each_node(t, [&](const TermPtr& n) {
        if (n->kind == TermKind::PatVar) terms.insert(n->name);
        if (n->dir.symbolic()) dirs.insert(n->dir.var);
        if (n->set) {
            std::function<void(const IndexSetPtr&)> walk = [&](const IndexSetPtr& s) {
                if (s->kind == SetKind::Var) sets.insert(s->name);
                if (s->kind == SetKind::Product)
                    for (const auto& f : s->factors) walk(f);
            };
            walk(n->set);
        }
    });
}

inline std::string poly_str(const ScalarPoly& p) {
    if (p.terms.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : p.terms) {
        if (!out.empty()) out += " + ";
        std::ostringstream os;
        if (c.imag() == 0.0)
            os << c.real();
        else
            os << "(" << c.real() << "+" << c.imag() << "i)";
        out += os.str();
        for (const auto& s : m) out += "*" + s;
    }
    return out;
}

} // namespace detail

class RuleEngine {
public:
    explicit RuleEngine(ShapeEnv env) : env_(std::move(env)) {}

    const ShapeEnv& shape_env() const { return env_; }
    const Subst& defs() const { return defs_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }

    void set_fuel(long n) { fuel_limit_ = n; }
    void set_trace(std::vector<TraceEntry>* t) { trace_ = t; }

    // Definition bodies are stored fully expanded, so one substitution pass
    // inlines everything.
    void define(const std::string& name, const TermPtr& body) {
        defs_[name] = canon(subst(body, defs_), env_);
    }

    void add_rule(RewriteRule r) { rules_.push_back(std::move(r)); }

    void add_equation(const Equation& e) {
        RewriteRule r;
        r.name = e.name;
        r.lhs = canon(e.lhs, env_);
        r.rhs = canon(e.rhs, env_);
        r.cond_pred = e.cond_pred;
        r.cond_arg = e.cond_arg;
        if (r.lhs->kind == TermKind::PatVar || r.lhs->kind == TermKind::ScalarLit)
            throw std::invalid_argument("equation '" + e.name + "' rewrites a bare variable");
        std::set<std::string> lt, ld, ls, rt, rd, rs;
        detail::collect_pat_vars(r.lhs, lt, ld, ls);
        detail::collect_pat_vars(r.rhs, rt, rd, rs);
        if (r.cond_arg) detail::collect_pat_vars(r.cond_arg, rt, rd, rs);
        for (const auto& v : rt)
            if (!lt.count(v))
                throw std::invalid_argument("equation '" + e.name + "' uses unbound variable '" +
                                            v + "'");
        for (const auto& v : rd)
            if (!ld.count(v))
                throw std::invalid_argument("equation '" + e.name + "' uses unbound direction '" +
                                            v + "'");
        for (const auto& v : rs)
            if (!ls.count(v))
                throw std::invalid_argument("equation '" + e.name + "' uses unbound set '" + v +
                                            "'");
        auto lsh = infer_shape(r.lhs, env_);
        auto rsh = infer_shape(r.rhs, env_);
        if (lsh && rsh && !shape_compat(*lsh, *rsh))
            throw std::invalid_argument("equation '" + e.name + "' changes shape from " +
                                        lsh->str() + " to " + rsh->str());
        if (!e.cond_pred.empty() && e.cond_pred != "nonzero" && e.cond_pred != "conformable")
            throw std::invalid_argument("equation '" + e.name + "' uses unknown condition '" +
                                        e.cond_pred + "'");
        if (e.cond_pred == "conformable" &&
            (e.cond_arg->kind != TermKind::Mul || e.cond_arg->arity() != 2))
            throw std::invalid_argument("conformable() takes a binary product");
        rules_.push_back(std::move(r));
    }

    void load_unit(const SourceUnit& u) {
        for (const auto& d : u.defs) define(d.name, d.value);
        for (const auto& e : u.equations) add_equation(e);
    }

    TermPtr inline_defs(const TermPtr& t) const { return canon(subst(t, defs_), env_); }

    TermPtr normalize(const TermPtr& t) {
        fuel_ = fuel_limit_;
        normal_.clear();
        TermPtr out = reduce(inline_defs(t));
        normal_.clear();
        return out;
    }

    bool condition_holds(const RewriteRule& r, const Binding& b) const {
        if (r.cond_pred.empty()) return true;
        if (r.cond_pred == "nonzero") {
            TermPtr arg = canon(b.apply(r.cond_arg), env_);
            auto p = expand_scalar(arg);
            return p && provably_nonzero(*p);
        }
        if (r.cond_pred == "conformable") {
            TermPtr a = canon(b.apply(r.cond_arg->kid(0)), env_);
            TermPtr c = canon(b.apply(r.cond_arg->kid(1)), env_);
            auto sa = infer_shape(a, env_);
            auto sc = infer_shape(c, env_);
            if (!sa || !sc || !sa->is_matrix() || !sc->is_matrix()) return false;
            if (!sa->cols || !sc->rows) return false;
            return set_list_eq(flat_sets(sa->cols), flat_sets(sc->rows));
        }
        return false;
    }

    // ---- requirement discharge ---------------------------------------

    struct Invertibility {
        bool proven = false;
        std::string reason;
        TermPtr normal_form;
    };

    Invertibility check_requirement(const TermPtr& arg) {
        Invertibility out;
        out.normal_form = normalize(arg);
        out.proven = prove_invertible(out.normal_form, out.reason);
        if (!out.proven && out.reason.empty())
            out.reason = "stuck normal form: " + pretty_term(out.normal_form);
        return out;
    }

private:
    ShapeEnv env_;
    Subst defs_;
    std::vector<RewriteRule> rules_;
    long fuel_limit_ = 100000;
    long fuel_ = 0;
    std::vector<TraceEntry>* trace_ = nullptr;
    // Nodes already in normal form, keyed by identity; the mapped value
    // keeps the node alive so an address is never recycled while cached.
    // Valid within one normalize() call (rules cannot change mid-call).
    std::unordered_map<const Term*, TermPtr> normal_;

    static bool nary_kind(TermKind k) {
        return k == TermKind::Add || k == TermKind::Mul || k == TermKind::Tensor;
    }

    TermPtr reduce(const TermPtr& t) {
        if (normal_.count(t.get())) return t;
        TermPtr cur = t;
        while (true) {
            // Reducing kids can surface scalar factors or flatten nests at
            // this node, so re-canonicalize and settle before root steps.
            TermPtr red = canon(map_kids(cur, [&](const TermPtr& k) { return reduce(k); }), env_);
            if (!term_eq(red, cur)) {
                // settle churn counts against the budget too, so a
                // non-converging canonicalization fails loudly
                if (--fuel_ < 0) throw FuelExhausted(fuel_limit_);
                cur = std::move(red);
                continue;
            }
            TermPtr next = step(cur);
            if (!next) break;
            cur = std::move(next);
        }
        normal_.emplace(cur.get(), cur);
        return cur;
    }

    // One rewrite at the root of t; returns the canonical replacement.
    TermPtr step(const TermPtr& t) {
        for (const auto& r : rules_) {
            TermPtr raw = r.procedural() ? r.proc(t, *this) : apply_syntactic(r, t);
            if (!raw) continue;
            TermPtr next = canon(raw, env_);
            if (term_eq(next, t)) continue; // unproductive; try further rules
            if (--fuel_ < 0) throw FuelExhausted(fuel_limit_);
            if (trace_) trace_->push_back({r.name, pretty_term(t), pretty_term(next)});
            return next;
        }
        return nullptr;
    }

    TermPtr apply_syntactic(const RewriteRule& r, const TermPtr& t) const {
        Matcher m(env_);
        if (!r.cond_pred.empty())
            m.accept = [&](const Binding& b) { return condition_holds(r, b); };
        if (nary_kind(t->kind) && r.lhs->kind == t->kind) {
            auto hit = m.match_window(r.lhs, t);
            if (!hit) return nullptr;
            std::sort(hit->used.begin(), hit->used.end());
            TermPtr rhs = hit->bind.apply(r.rhs);
            if (hit->used.size() == t->arity()) return rhs;
            TermList ks;
            size_t u = 0;
            bool placed = false;
            for (size_t i = 0; i < t->arity(); ++i) {
                if (u < hit->used.size() && hit->used[u] == i) {
                    ++u;
                    if (!placed) {
                        ks.push_back(rhs);
                        placed = true;
                    }
                    continue;
                }
                ks.push_back(t->kid(i));
            }
            return t_nary(t->kind, std::move(ks));
        }
        auto b = m.match(r.lhs, t);
        if (!b) return nullptr;
        return b->apply(r.rhs);
    }

    bool prove_invertible(const TermPtr& t, std::string& reason) const {
        switch (t->kind) {
        case TermKind::Identity:
            reason = "identity";
            return true;
        case TermKind::Gamma:
        case TermKind::Gamma5:
            reason = "gamma matrices square to the identity";
            return true;
        case TermKind::ScalarMul: {
            auto p = expand_scalar(t->kid(0));
            if (!p || !provably_nonzero(*p)) {
                reason = "scale factor " + pretty_term(t->kid(0)) + " is not provably nonzero";
                return false;
            }
            std::string inner;
            if (!prove_invertible(t->kid(1), inner)) {
                reason = inner;
                return false;
            }
            reason = "nonzero multiple of: " + inner;
            return true;
        }
        case TermKind::DirectSum: {
            std::string inner;
            if (!prove_invertible(t->kid(0), inner)) {
                reason = inner;
                return false;
            }
            reason = "block diagonal with invertible blocks: " + inner;
            return true;
        }
        case TermKind::Tensor: {
            for (const auto& k : t->kids) {
                std::string inner;
                if (!prove_invertible(k, inner)) {
                    reason = inner;
                    return false;
                }
            }
            reason = "tensor product of invertible factors";
            return true;
        }
        case TermKind::Add:
            return prove_twisted_identity(t, reason);
        default:
            return false;
        }
    }

    // alpha * I + beta * (I (x) gamma5): eigenvalues are alpha +- beta, so
    // the block is invertible when alpha^2 - beta^2 is provably nonzero.
    bool prove_twisted_identity(const TermPtr& t, std::string& reason) const {
        if (t->arity() != 2) return false;
        auto split = [](const TermPtr& x) -> std::pair<TermPtr, TermPtr> {
            if (x->kind == TermKind::ScalarMul) return {x->kid(0), x->kid(1)};
            return {t_lit(Complex{1.0, 0.0}), x};
        };
        for (int pick = 0; pick < 2; ++pick) {
            auto [alpha, ident] = split(t->kid(size_t(pick)));
            auto [beta, twist] = split(t->kid(size_t(1 - pick)));
            if (ident->kind != TermKind::Identity) continue;
            if (twist->kind != TermKind::Tensor || twist->arity() != 2) continue;
            if (twist->kid(0)->kind != TermKind::Identity) continue;
            if (twist->kid(1)->kind != TermKind::Gamma5) continue;
            std::vector<IndexSetPtr> want = flat_sets(twist->kid(0)->set);
            want.push_back(spin_set());
            if (!set_list_eq(flat_sets(ident->set), want)) continue;
            auto pa = expand_scalar(alpha);
            auto pb = expand_scalar(beta);
            if (!pa || !pb) continue;
            ScalarPoly q = *pa * *pa;
            q -= *pb * *pb;
            if (!provably_nonzero(q)) {
                reason = "alpha^2 - beta^2 = " + detail::poly_str(q) + " is not provably nonzero";
                return false;
            }
            reason = "alpha^2 - beta^2 = " + detail::poly_str(q) + " is nonzero";
            return true;
        }
        return false;
    }
};

// ---- procedural rules -------------------------------------------------

namespace detail {

// Lattice-displacement parity of an operator: how many single-site shifts
// it applies, mod 2. Anything that is not manifestly site-diagonal or a
// shift chain reports nullopt.
inline std::optional<int> disp_parity(const TermPtr& t) {
    switch (t->kind) {
    case TermKind::Shift:
        return 1;
    case TermKind::ScalarLit:
    case TermKind::SymScalar:
    case TermKind::ImagUnit:
    case TermKind::Identity:
    case TermKind::Gamma:
    case TermKind::Gamma5:
    case TermKind::GaugeLink:
        return 0;
    case TermKind::Mul:
    case TermKind::Tensor: {
        int p = 0;
        for (const auto& k : t->kids) {
            auto d = disp_parity(k);
            if (!d) return std::nullopt;
            p ^= *d;
        }
        return p;
    }
    case TermKind::ScalarMul:
        return disp_parity(t->kid(1));
    case TermKind::Add:
    case TermKind::Sub: {
        std::optional<int> agree;
        for (const auto& k : t->kids) {
            auto d = disp_parity(k);
            if (!d) return std::nullopt;
            if (agree && *agree != *d) return std::nullopt;
            agree = d;
        }
        return agree;
    }
    case TermKind::DirectSum:
    case TermKind::IndexedSum:
    case TermKind::Dagger:
    case TermKind::Transpose:
        // daggering or summing directions preserves hop count parity
        return disp_parity(t->kid(0));
    default:
        return std::nullopt;
    }
}

struct ProjEnd {
    Parity parity;
    IndexSetPtr lattice;
    int rest = 0; // displacement parity of the non-projection part
};

// Leading parity restriction of an operand: a projection at the head of
// its lattice slot, with the displacement of whatever else rides along.
inline std::optional<ProjEnd> proj_prefix(const TermPtr& t) {
    if (t->kind == TermKind::Projection) return ProjEnd{t->parity, t->set, 0};
    if (t->kind == TermKind::ScalarMul) return proj_prefix(t->kid(1));
    if (t->kind == TermKind::Mul || t->kind == TermKind::Tensor) {
        auto head = proj_prefix(t->kid(0));
        if (!head) return std::nullopt;
        for (size_t i = 1; i < t->arity(); ++i) {
            auto d = disp_parity(t->kid(i));
            if (!d) return std::nullopt;
            head->rest ^= *d;
        }
        return head;
    }
    return std::nullopt;
}

inline std::optional<ProjEnd> proj_suffix(const TermPtr& t) {
    if (t->kind == TermKind::Transpose && t->kid(0)->kind == TermKind::Projection)
        return ProjEnd{t->kid(0)->parity, t->kid(0)->set, 0};
    if (t->kind == TermKind::ScalarMul) return proj_suffix(t->kid(1));
    if (t->kind == TermKind::Mul) {
        auto tail = proj_suffix(t->kids.back());
        if (!tail) return std::nullopt;
        for (size_t i = 0; i + 1 < t->arity(); ++i) {
            auto d = disp_parity(t->kid(i));
            if (!d) return std::nullopt;
            tail->rest ^= *d;
        }
        return tail;
    }
    if (t->kind == TermKind::Tensor) {
        // the lattice slot leads a tensor operand
        auto tail = proj_suffix(t->kid(0));
        if (!tail) return std::nullopt;
        for (size_t i = 1; i < t->arity(); ++i) {
            auto d = disp_parity(t->kid(i));
            if (!d) return std::nullopt;
            tail->rest ^= *d;
        }
        return tail;
    }
    return std::nullopt;
}

inline bool all_extents_even(const IndexSetPtr& s) {
    if (!s || (s->kind != SetKind::Lattice && s->kind != SetKind::Parity)) return false;
    for (int e : s->dims)
        if (e % 2 != 0) return false;
    return true;
}

// Tensor factor list of an operand, splitting identities over product sets
// (also inside tensor operands) so they can regroup with their neighbours.
inline void tensor_factors(const TermPtr& t, TermList& out) {
    if (t->kind == TermKind::Tensor) {
        for (const auto& k : t->kids) tensor_factors(k, out);
        return;
    }
    if (t->kind == TermKind::Identity && t->set->kind == SetKind::Product) {
        for (const auto& f : t->set->factors) out.push_back(t_identity(f));
        return;
    }
    out.push_back(t);
}

} // namespace detail

// A product restricted to one parity on both sides vanishes when the net
// hop count between the projections has the wrong parity: on an even-extent
// torus every single-site shift flips the coordinate-sum parity, and all
// other factors are site-diagonal.
inline RewriteRule parity_zero_rule() {
    RewriteRule r;
    r.name = "parity_zero";
    r.proc = [](const TermPtr& t, const RuleEngine& eng) -> TermPtr {
        if (t->kind != TermKind::Mul || t->arity() < 2) return nullptr;
        auto head = detail::proj_prefix(t->kids.front());
        auto tail = detail::proj_suffix(t->kids.back());
        if (!head || !tail) return nullptr;
        if (!set_eq(head->lattice, tail->lattice)) return nullptr;
        if (!detail::all_extents_even(head->lattice)) return nullptr;
        int total = head->rest ^ tail->rest;
        for (size_t i = 1; i + 1 < t->arity(); ++i) {
            auto d = detail::disp_parity(t->kid(i));
            if (!d) return nullptr;
            total ^= *d;
        }
        bool same = head->parity == tail->parity;
        if (same != (total == 0)) {
            auto sh = infer_shape(t, eng.shape_env());
            if (!sh || !sh->is_matrix() || !sh->rows || !sh->cols) return nullptr;
            return t_zero(PatSort::Matrix, sh->rows, sh->cols);
        }
        return nullptr;
    };
    return r;
}

// Zero annihilates products and tensor factors and drops out of sums.
inline RewriteRule zero_collapse_rule() {
    RewriteRule r;
    r.name = "zero_collapse";
    r.proc = [](const TermPtr& t, const RuleEngine& eng) -> TermPtr {
        auto has_zero = [&](const TermPtr& n) {
            for (const auto& k : n->kids)
                if (k->kind == TermKind::Zero) return true;
            return false;
        };
        switch (t->kind) {
        case TermKind::Mul:
        case TermKind::Tensor: {
            if (!has_zero(t)) return nullptr;
            auto sh = infer_shape(t, eng.shape_env());
            if (!sh || !sh->rows) return nullptr;
            if (sh->is_vector()) return t_zero(PatSort::Vector, sh->rows);
            if (sh->is_matrix() && sh->cols) return t_zero(PatSort::Matrix, sh->rows, sh->cols);
            return nullptr;
        }
        case TermKind::Add: {
            if (!has_zero(t)) return nullptr;
            TermList keep;
            for (const auto& k : t->kids)
                if (k->kind != TermKind::Zero) keep.push_back(k);
            if (keep.empty()) return t->kids.front();
            return keep.size() == 1 ? keep[0] : t_nary(TermKind::Add, std::move(keep));
        }
        case TermKind::Sub: {
            if (t->kid(1)->kind == TermKind::Zero) return t->kid(0);
            if (t->kid(0)->kind == TermKind::Zero)
                return t_scalar_mul(t_lit(Complex{-1.0, 0.0}), t->kid(1));
            return nullptr;
        }
        case TermKind::ScalarMul:
            if (t->kid(1)->kind == TermKind::Zero) return t->kid(1);
            return nullptr;
        case TermKind::Transpose:
        case TermKind::Dagger: {
            const TermPtr& k = t->kid(0);
            if (k->kind != TermKind::Zero || k->sort != PatSort::Matrix) return nullptr;
            return t_zero(PatSort::Matrix, k->set2, k->set);
        }
        case TermKind::InnerProduct:
            if (t->kid(0)->kind == TermKind::Zero || t->kid(1)->kind == TermKind::Zero)
                return t_lit(Complex{});
            return nullptr;
        default:
            return nullptr;
        }
    };
    return r;
}

// Groupwise Kronecker mixed product: adjacent factors whose tensor
// structures do not line up one-to-one are regrouped along matching
// boundary dimensions, e.g. (P (x) I_C (x) I_S) * (H (x) G) with H over
// L (x) C contracts as ((P (x) I_C) * H) (x) (I_S * G). Identities over
// product sets split into per-factor identities first.
inline RewriteRule tensor_regroup_rule() {
    RewriteRule r;
    r.name = "tensor_regroup";
    r.proc = [](const TermPtr& t, const RuleEngine& eng) -> TermPtr {
        if (t->kind != TermKind::Mul) return nullptr;
        const ShapeEnv& env = eng.shape_env();
        auto cols_of = [&](const TermPtr& x) -> std::optional<std::vector<IndexSetPtr>> {
            auto s = infer_shape(x, env);
            if (!s || !s->is_matrix() || !s->cols) return std::nullopt;
            return flat_sets(s->cols);
        };
        auto rows_of = [&](const TermPtr& x) -> std::optional<std::vector<IndexSetPtr>> {
            auto s = infer_shape(x, env);
            if (!s || !s->is_matrix() || !s->rows) return std::nullopt;
            return flat_sets(s->rows);
        };
        for (size_t i = 0; i + 1 < t->arity(); ++i) {
            TermList xf, yf;
            detail::tensor_factors(t->kid(i), xf);
            detail::tensor_factors(t->kid(i + 1), yf);
            if (xf.size() <= 1 && yf.size() <= 1) continue;
            std::vector<std::pair<TermList, TermList>> groups;
            size_t a = 0, b = 0;
            bool ok = true;
            while (ok && (a < xf.size() || b < yf.size())) {
                if (a == xf.size() || b == yf.size()) {
                    ok = false;
                    break;
                }
                TermList gx{xf[a++]}, gy{yf[b++]};
                auto crun = cols_of(gx[0]);
                auto rrun = rows_of(gy[0]);
                if (!crun || !rrun) {
                    ok = false;
                    break;
                }
                while (ok && !set_list_eq(*crun, *rrun)) {
                    if (crun->size() < rrun->size()) {
                        if (a == xf.size()) {
                            ok = false;
                            break;
                        }
                        auto more = cols_of(xf[a]);
                        if (!more) {
                            ok = false;
                            break;
                        }
                        gx.push_back(xf[a++]);
                        crun->insert(crun->end(), more->begin(), more->end());
                    } else if (crun->size() > rrun->size()) {
                        if (b == yf.size()) {
                            ok = false;
                            break;
                        }
                        auto more = rows_of(yf[b]);
                        if (!more) {
                            ok = false;
                            break;
                        }
                        gy.push_back(yf[b++]);
                        rrun->insert(rrun->end(), more->begin(), more->end());
                    } else {
                        ok = false;
                    }
                }
                if (ok) groups.emplace_back(std::move(gx), std::move(gy));
            }
            if (!ok || groups.size() < 2) continue;
            TermList parts;
            for (auto& [gx, gy] : groups) {
                TermPtr x = gx.size() == 1 ? gx[0] : t_nary(TermKind::Tensor, gx);
                TermPtr y = gy.size() == 1 ? gy[0] : t_nary(TermKind::Tensor, gy);
                parts.push_back(t_mul(std::move(x), std::move(y)));
            }
            TermPtr merged = t_nary(TermKind::Tensor, std::move(parts));
            TermList ks;
            for (size_t j = 0; j < i; ++j) ks.push_back(t->kid(j));
            ks.push_back(merged);
            for (size_t j = i + 2; j < t->arity(); ++j) ks.push_back(t->kid(j));
            return ks.size() == 1 ? ks[0] : t_nary(TermKind::Mul, std::move(ks));
        }
        return nullptr;
    };
    return r;
}

// Standard engine: corpus equations in file order, then the procedural
// rules that need shape information.
inline RuleEngine make_engine(const SourceUnit& unit, ShapeEnv env) {
    RuleEngine e(std::move(env));
    e.load_unit(unit);
    e.add_rule(zero_collapse_rule());
    e.add_rule(parity_zero_rule());
    e.add_rule(tensor_regroup_rule());
    return e;
}

} // namespace qiral
