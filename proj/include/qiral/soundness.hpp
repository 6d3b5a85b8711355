#pragma once
// Numeric soundness checks for rewrite rules: both sides of an equation are
// instantiated with random dense values for every pattern variable and
// compared as dense matrices. Set variables all map to one small fresh index
// set per trial, which keeps every product conformable without a shape
// solver; rule validity is about values, not about which sizes were tried.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qiral/denote.hpp"
#include "qiral/engine.hpp"
#include "qiral/match.hpp"
#include "qiral/printer.hpp"
#include "qiral/rng.hpp"

namespace qiral {

struct SoundnessReport {
    std::string rule;
    int trials = 0;
    double worst_rel = 0.0;
    bool ok = true;
    std::string detail;
};

namespace detail {

struct RuleVars {
    std::map<std::string, PatSort> terms;
    std::set<std::string> dirs;
    std::set<std::string> sets;
};

inline void collect_rule_vars(const TermPtr& t, RuleVars& out) {
    for_each_node(t, [&](const TermPtr& n) {
        if (n->kind == TermKind::PatVar) out.terms.emplace(n->name, n->sort);
        if (n->dir.symbolic()) out.dirs.insert(n->dir.var);
        if (n->set) {
            std::function<void(const IndexSetPtr&)> walk = [&](const IndexSetPtr& s) {
                if (s->kind == SetKind::Var) out.sets.insert(s->name);
                if (s->kind == SetKind::Product)
                    for (const auto& f : s->factors) walk(f);
            };
            walk(n->set);
        }
    });
}

inline Dense random_dense(Rng& rng, long r, long c) {
    Dense m(r, c);
    for (long i = 0; i < r; ++i)
        for (long j = 0; j < c; ++j) m(i, j) = rng.cgaussian();
    return m;
}

inline double rel_diff(const Dense& a, const Dense& b) {
    double na = a.norm2(), nb = b.norm2();
    double scale = std::max(na, nb);
    if (scale < 1e-300) return 0.0;
    return (a - b).norm2() / scale;
}

} // namespace detail

// Runs `trials` random instantiations of the rule and checks that both
// sides denote the same dense matrix to relative Frobenius tolerance.
inline SoundnessReport check_rule_soundness(const RewriteRule& r, const LatticeGeom& geom,
                                            std::uint64_t seed, int trials = 20,
                                            double tol = 1e-12) {
    SoundnessReport rep;
    rep.rule = r.name;
    if (r.procedural()) {
        rep.ok = false;
        rep.detail = "procedural rule; needs a dedicated oracle test";
        return rep;
    }

    detail::RuleVars vars;
    detail::collect_rule_vars(r.lhs, vars);
    detail::collect_rule_vars(r.rhs, vars);
    if (r.cond_arg) detail::collect_rule_vars(r.cond_arg, vars);

    std::uint64_t mix = std::hash<std::string>{}(r.name);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(seed ^ mix ^ (std::uint64_t(trial) * 0x9e3779b97f4a7c15ULL));
        GaugeField gauge = GaugeField::random(geom, rng.bits());

        long n = 2 + (trial % 3);
        IndexSetPtr common = IndexSet::atomic("R", int(n));
        Binding bind;
        for (const auto& s : vars.sets) bind.sets.emplace(s, common);
        for (const auto& d : vars.dirs)
            bind.dirs.emplace(d, Dir::lit(int(rng.below(4)), rng.below(2) == 1));

        TermPtr lhs = bind.apply(r.lhs);
        TermPtr rhs = bind.apply(r.rhs);
        TermPtr cond = r.cond_arg ? bind.apply(r.cond_arg) : nullptr;

        DenoteEnv env;
        env.geom = &geom;
        env.gauge = &gauge;

        bool sampled = false;
        for (int attempt = 0; attempt < 100 && !sampled; ++attempt) {
            env.bind.clear();
            for (const auto& [name, sort] : vars.terms) {
                switch (sort) {
                case PatSort::Scalar: env.bind.emplace(name, detail::random_dense(rng, 1, 1)); break;
                case PatSort::Vector: env.bind.emplace(name, detail::random_dense(rng, n, 1)); break;
                case PatSort::Matrix: env.bind.emplace(name, detail::random_dense(rng, n, n)); break;
                }
            }
            // keep conditioned instances away from the singular locus
            if (cond && r.cond_pred == "nonzero" && std::abs(denote(cond, env)(0, 0)) < 0.1)
                continue;
            sampled = true;
        }
        if (!sampled) {
            rep.ok = false;
            rep.detail = "could not sample an instance satisfying " + r.cond_pred;
            return rep;
        }

        Dense dl, dr;
        try {
            dl = denote(lhs, env);
            dr = denote(rhs, env);
        } catch (const std::exception& e) {
            rep.ok = false;
            rep.detail = std::string("denotation failed: ") + e.what();
            return rep;
        }
        if (dl.rows() != dr.rows() || dl.cols() != dr.cols()) {
            rep.ok = false;
            rep.detail = "sides have different dense shapes " + dl.dim_str() + " vs " +
                         dr.dim_str();
            return rep;
        }
        double rel = detail::rel_diff(dl, dr);
        rep.worst_rel = std::max(rep.worst_rel, rel);
        ++rep.trials;
        if (rel > tol) {
            rep.ok = false;
            rep.detail = "relative error " + std::to_string(rel) + " on trial " +
                         std::to_string(trial);
            return rep;
        }
    }
    return rep;
}

inline std::vector<SoundnessReport> check_all_equations(const RuleEngine& eng,
                                                        const LatticeGeom& geom,
                                                        std::uint64_t seed, int trials = 20,
                                                        double tol = 1e-12) {
    std::vector<SoundnessReport> out;
    for (const auto& r : eng.rules())
        if (!r.procedural()) out.push_back(check_rule_soundness(r, geom, seed, trials, tol));
    return out;
}

} // namespace qiral
