#pragma once
// Pattern matching over canonical terms.
//
// Flattened Add matches as a multiset (commutative), flattened Mul and
// Tensor match ordered; plain pattern variables may absorb a contiguous
// segment (ordered) or, as the last variable of a nested Add pattern, the
// remaining operands. At the redex root an n-ary pattern may cover just a
// sub-window of the subject; the caller reattaches the leftover operands.
//
// Matching runs in continuation style: every candidate binding is offered
// to a continuation, and a refusal (a later operand failing, or the rule
// condition rejecting the binding) resumes enumeration at the innermost
// choice point. Candidates are enumerated in ascending operand order with
// shortest segments first, so the first accepted hit is deterministic.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qiral/canon.hpp"
#include "qiral/shape.hpp"
#include "qiral/term.hpp"

namespace qiral {

struct Binding {
    std::map<std::string, TermPtr> terms;
    std::map<std::string, Dir> dirs;
    std::map<std::string, IndexSetPtr> sets;
    std::map<std::string, std::string> binders; // pattern binder -> subject binder

    TermPtr apply(const TermPtr& t) const {
        TermPtr r = subst(t, terms);
        for (const auto& [v, d] : dirs) r = subst_dir(r, v, d);
        if (!sets.empty()) r = subst_sets(r, sets);
        return r;
    }
};

// A root-level n-ary match: the binding plus which subject operands the
// pattern consumed.
struct NaryHit {
    Binding bind;
    std::vector<size_t> used;
};

inline bool dir_eq(const Dir& a, const Dir& b) {
    return a.axis == b.axis && a.var == b.var && a.neg == b.neg;
}

class Matcher {
public:
    explicit Matcher(const ShapeEnv& env) : env_(env) {}

    // Optional acceptance predicate over complete bindings (rule
    // conditions); a refusal makes the matcher backtrack.
    std::function<bool(const Binding&)> accept;

    std::optional<Binding> match(const TermPtr& pat, const TermPtr& sub, Binding b = {}) {
        std::optional<Binding> out;
        match_term(pat, sub, std::move(b), [&](Binding&& r) {
            if (accept && !accept(r)) return false;
            out = std::move(r);
            return true;
        });
        return out;
    }

    // Window match at an n-ary redex root; pat and sub share the same
    // flattened kind and the hit records consumed operand indices.
    std::optional<NaryHit> match_window(const TermPtr& pat, const TermPtr& sub) {
        if (pat->kind != sub->kind) return std::nullopt;
        std::optional<NaryHit> out;
        WindowCont commit = [&](Binding&& bnd, std::vector<size_t>&& idx) {
            if (accept && !accept(bnd)) return false;
            out = NaryHit{std::move(bnd), std::move(idx)};
            return true;
        };
        if (pat->kind == TermKind::Add)
            match_multiset(pat->kids, sub->kids, Binding{}, /*leftover=*/true, commit);
        else
            match_segment(pat->kids, sub->kids, pat->kind, Binding{}, /*leftover=*/true, commit);
        return out;
    }

private:
    using Cont = std::function<bool(Binding&&)>;
    using WindowCont = std::function<bool(Binding&&, std::vector<size_t>&&)>;

    const ShapeEnv& env_;

    bool sort_ok(PatSort sort, const TermPtr& sub) {
        ShapeInfer inf(env_);
        auto s = inf.infer(sub);
        if (!s) return false;
        switch (sort) {
        case PatSort::Scalar: return s->is_scalar();
        case PatSort::Vector: return s->is_vector();
        case PatSort::Matrix: return s->is_matrix();
        }
        return false;
    }

    std::optional<Binding> bind_var(const TermPtr& pat, const TermPtr& sub, Binding b) {
        if (!sort_ok(pat->sort, sub)) return std::nullopt;
        auto it = b.terms.find(pat->name);
        if (it != b.terms.end())
            return term_eq(it->second, sub) ? std::optional<Binding>(std::move(b)) : std::nullopt;
        b.terms.emplace(pat->name, sub);
        return b;
    }

    std::optional<Binding> match_dir(const Dir& pd, const Dir& sd, Binding b) {
        if (!pd.symbolic())
            return (!sd.symbolic() && pd.axis == sd.axis && pd.neg == sd.neg)
                       ? std::optional<Binding>(std::move(b))
                       : std::nullopt;
        if (auto it = b.binders.find(pd.var); it != b.binders.end())
            return (sd.symbolic() && sd.var == it->second && sd.neg == pd.neg)
                       ? std::optional<Binding>(std::move(b))
                       : std::nullopt;
        Dir target = pd.neg ? sd.negated() : sd;
        auto it = b.dirs.find(pd.var);
        if (it != b.dirs.end())
            return dir_eq(it->second, target) ? std::optional<Binding>(std::move(b)) : std::nullopt;
        b.dirs.emplace(pd.var, target);
        return b;
    }

    std::optional<Binding> match_set(const IndexSetPtr& ps, const IndexSetPtr& ss, Binding b) {
        if (ps->kind == SetKind::Var) {
            auto it = b.sets.find(ps->name);
            if (it != b.sets.end())
                return set_eq(it->second, ss) ? std::optional<Binding>(std::move(b)) : std::nullopt;
            b.sets.emplace(ps->name, ss);
            return b;
        }
        if (ps->kind == SetKind::Product) {
            std::vector<IndexSetPtr> sf = flat_sets(ss);
            const auto& pf = ps->factors;
            size_t var_at = pf.size();
            for (size_t i = 0; i < pf.size(); ++i)
                if (pf[i]->kind == SetKind::Var) {
                    if (var_at != pf.size()) return std::nullopt; // at most one variable factor
                    var_at = i;
                }
            if (var_at == pf.size()) {
                if (pf.size() != sf.size()) return std::nullopt;
                for (size_t i = 0; i < pf.size(); ++i)
                    if (!set_eq(pf[i], sf[i])) return std::nullopt;
                return b;
            }
            size_t pre = var_at, post = pf.size() - var_at - 1;
            if (sf.size() < pre + post + 1) return std::nullopt;
            for (size_t i = 0; i < pre; ++i)
                if (!set_eq(pf[i], sf[i])) return std::nullopt;
            for (size_t i = 0; i < post; ++i)
                if (!set_eq(pf[pf.size() - 1 - i], sf[sf.size() - 1 - i])) return std::nullopt;
            std::vector<IndexSetPtr> mid(sf.begin() + pre, sf.end() - post);
            return match_set(pf[var_at], IndexSet::product(std::move(mid)), std::move(b));
        }
        return set_eq(ps, ss) ? std::optional<Binding>(std::move(b)) : std::nullopt;
    }

    bool match_term(const TermPtr& pat, const TermPtr& sub, Binding b, const Cont& k) {
        if (pat->kind == TermKind::PatVar) {
            auto nb = bind_var(pat, sub, std::move(b));
            return nb && k(std::move(*nb));
        }

        // A scalar-variable prefix is optional: sigma * A also matches a
        // bare A with sigma bound to 1.
        if (pat->kind == TermKind::ScalarMul && sub->kind != TermKind::ScalarMul) {
            const TermPtr& sv = pat->kid(0);
            if (sv->kind == TermKind::PatVar && sv->sort == PatSort::Scalar) {
                auto nb = bind_var(sv, t_lit(Complex{1.0, 0.0}), std::move(b));
                return nb && match_term(pat->kid(1), sub, std::move(*nb), k);
            }
            return false;
        }

        if (pat->kind != sub->kind) return false;
        switch (pat->kind) {
        case TermKind::ScalarLit:
            return pat->lit == sub->lit && k(std::move(b));
        case TermKind::ImagUnit:
        case TermKind::Gamma5:
            return k(std::move(b));
        case TermKind::SymScalar:
        case TermKind::VectorSym:
        case TermKind::MatrixSym:
            return pat->name == sub->name && k(std::move(b));
        case TermKind::Identity: {
            auto nb = match_set(pat->set, sub->set, std::move(b));
            return nb && k(std::move(*nb));
        }
        case TermKind::Gamma: {
            auto nb = match_dir(pat->dir, sub->dir, std::move(b));
            return nb && k(std::move(*nb));
        }
        case TermKind::Shift: {
            auto nb = match_set(pat->set, sub->set, std::move(b));
            if (!nb) return false;
            auto db = match_dir(pat->dir, sub->dir, std::move(*nb));
            return db && k(std::move(*db));
        }
        case TermKind::GaugeLink: {
            if (pat->dag != sub->dag) return false;
            auto it = b.binders.find(pat->site);
            const std::string& want = it != b.binders.end() ? it->second : pat->site;
            if (want != sub->site) return false;
            auto nb = match_dir(pat->dir, sub->dir, std::move(b));
            return nb && k(std::move(*nb));
        }
        case TermKind::Projection: {
            if (pat->parity != sub->parity) return false;
            auto nb = match_set(pat->set, sub->set, std::move(b));
            return nb && k(std::move(*nb));
        }
        case TermKind::Zero: {
            // Null pattern shapes act as wildcards (they come from
            // canonicalizing 0 * A with an unconstrained A).
            if (pat->sort != sub->sort) return false;
            std::optional<Binding> cur(std::move(b));
            if (pat->set && sub->set) cur = match_set(pat->set, sub->set, std::move(*cur));
            if (cur && pat->set2 && sub->set2)
                cur = match_set(pat->set2, sub->set2, std::move(*cur));
            return cur && k(std::move(*cur));
        }
        case TermKind::SubVector: {
            auto nb = match_set(pat->set, sub->set, std::move(b));
            return nb && match_term(pat->kid(0), sub->kid(0), std::move(*nb), k);
        }
        case TermKind::DirectSum:
        case TermKind::IndexedSum: {
            auto nb = match_set(pat->set, sub->set, std::move(b));
            if (!nb) return false;
            Binding inner = std::move(*nb);
            auto prev = inner.binders.find(pat->name);
            std::optional<std::string> saved;
            if (prev != inner.binders.end()) saved = prev->second;
            inner.binders[pat->name] = sub->name;
            return match_term(pat->kid(0), sub->kid(0), std::move(inner), [&](Binding&& r) {
                // the binder is scoped to the body
                if (saved)
                    r.binders[pat->name] = *saved;
                else
                    r.binders.erase(pat->name);
                return k(std::move(r));
            });
        }
        case TermKind::Add:
            return match_multiset(pat->kids, sub->kids, std::move(b), /*leftover=*/false,
                                  drop_used(k));
        case TermKind::Mul:
        case TermKind::Tensor:
            return match_segment(pat->kids, sub->kids, pat->kind, std::move(b),
                                 /*leftover=*/false, drop_used(k));
        default:
            return pat->arity() == sub->arity() && match_kids(pat, sub, 0, std::move(b), k);
        }
    }

    bool match_kids(const TermPtr& pat, const TermPtr& sub, size_t i, Binding b, const Cont& k) {
        if (i == pat->arity()) return k(std::move(b));
        return match_term(pat->kid(i), sub->kid(i), std::move(b), [&](Binding&& r) {
            return match_kids(pat, sub, i + 1, std::move(r), k);
        });
    }

    static WindowCont drop_used(const Cont& k) {
        return [&k](Binding&& b, std::vector<size_t>&&) { return k(std::move(b)); };
    }

    static bool plain_var(const TermPtr& p) { return p->kind == TermKind::PatVar; }

    static TermPtr wrap(TermKind k, const std::vector<TermPtr>& ops) {
        if (ops.size() == 1) return ops[0];
        return t_nary(k, ops);
    }

    // Ordered matching of pattern operands against a contiguous run of
    // subject operands. Without leftovers the run must cover everything;
    // with leftovers any window is offered and `used` records it.
    bool match_segment(const TermList& pk, const TermList& sk, TermKind kind, Binding b,
                       bool leftover, const WindowCont& wk) {
        size_t max_lo = leftover ? sk.size() : 1;
        for (size_t lo = 0; lo < max_lo; ++lo)
            if (seg_rec(pk, 0, sk, lo, lo, kind, b, leftover, wk)) return true;
        return false;
    }

    bool seg_rec(const TermList& pk, size_t pi, const TermList& sk, size_t lo, size_t sj,
                 TermKind kind, Binding b, bool leftover, const WindowCont& wk) {
        if (pi == pk.size()) {
            if (!leftover && sj != sk.size()) return false;
            std::vector<size_t> used;
            used.reserve(sj - lo);
            for (size_t i = lo; i < sj; ++i) used.push_back(i);
            return wk(std::move(b), std::move(used));
        }
        size_t rest = pk.size() - pi - 1; // operands after this one need >= 1 each
        if (sj >= sk.size() || sk.size() - sj < rest + 1) return false;
        if (plain_var(pk[pi])) {
            size_t max_len = sk.size() - sj - rest;
            for (size_t len = 1; len <= max_len; ++len) {
                std::vector<TermPtr> seg(sk.begin() + sj, sk.begin() + sj + len);
                auto nb = bind_var(pk[pi], wrap(kind, seg), b);
                if (!nb) continue;
                if (seg_rec(pk, pi + 1, sk, lo, sj + len, kind, std::move(*nb), leftover, wk))
                    return true;
            }
            return false;
        }
        return match_term(pk[pi], sk[sj], b, [&](Binding&& r) {
            return seg_rec(pk, pi + 1, sk, lo, sj + 1, kind, std::move(r), leftover, wk);
        });
    }

    // Commutative matching: compound pattern operands each take one subject
    // operand; plain variables take one each, except that the final one
    // absorbs every remaining operand when the match must be covering.
    bool match_multiset(const TermList& pk, const TermList& sk, Binding b, bool leftover,
                        const WindowCont& wk) {
        std::vector<size_t> order;
        std::vector<size_t> vars;
        for (size_t i = 0; i < pk.size(); ++i)
            (plain_var(pk[i]) ? vars : order).push_back(i);
        order.insert(order.end(), vars.begin(), vars.end());
        size_t absorber = pk.size();
        if (!leftover) {
            if (vars.empty() && pk.size() != sk.size()) return false;
            if (!vars.empty()) absorber = vars.back();
        }
        std::vector<bool> used(sk.size(), false);
        return ac_rec(pk, sk, order, 0, absorber, used, std::move(b), leftover, wk);
    }

    bool ac_rec(const TermList& pk, const TermList& sk, const std::vector<size_t>& order,
                size_t oi, size_t absorber, std::vector<bool>& used, Binding b, bool leftover,
                const WindowCont& wk) {
        if (oi == order.size()) {
            std::vector<size_t> idx;
            for (size_t i = 0; i < used.size(); ++i)
                if (used[i]) idx.push_back(i);
            if (!leftover && idx.size() != sk.size()) return false;
            return wk(std::move(b), std::move(idx));
        }
        size_t p = order[oi];
        if (p == absorber) {
            // The absorber is the last operand in `order`; restore `used`
            // when the continuation refuses the candidate.
            std::vector<TermPtr> rest;
            for (size_t i = 0; i < sk.size(); ++i)
                if (!used[i]) rest.push_back(sk[i]);
            if (rest.empty()) return false;
            auto nb = bind_var(pk[p], wrap(TermKind::Add, rest), b);
            if (!nb) return false;
            std::vector<bool> saved = used;
            std::fill(used.begin(), used.end(), true);
            if (ac_rec(pk, sk, order, oi + 1, absorber, used, std::move(*nb), leftover, wk))
                return true;
            used = saved;
            return false;
        }
        for (size_t i = 0; i < sk.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            bool hit;
            if (plain_var(pk[p])) {
                auto nb = bind_var(pk[p], sk[i], b);
                hit = nb && ac_rec(pk, sk, order, oi + 1, absorber, used, std::move(*nb),
                                   leftover, wk);
            } else {
                hit = match_term(pk[p], sk[i], b, [&](Binding&& r) {
                    return ac_rec(pk, sk, order, oi + 1, absorber, used, std::move(r), leftover,
                                  wk);
                });
            }
            if (hit) return true;
            used[i] = false;
        }
        return false;
    }
};

} // namespace qiral
