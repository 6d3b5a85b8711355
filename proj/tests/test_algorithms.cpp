#include <catch2/catch_amalgamated.hpp>

#include "qiral/algorithms.hpp"
#include "qiral/check.hpp"
#include "qiral/denote.hpp"
#include "qiral/engine.hpp"
#include "qiral/parser.hpp"
#include "qiral/printer.hpp"

#include <fstream>
#include <map>
#include <sstream>

using namespace qiral;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string repo_path(const std::string& rel) {
    return std::string(QIRAL_SOURCE_DIR) + "/" + rel;
}

std::string prelude_text() {
    return slurp(repo_path("prelude/dirac.qir")) + "\n" + slurp(repo_path("prelude/simplify.qir")) +
           "\n" + slurp(repo_path("prelude/algorithms.qir"));
}

SourceUnit parse_ok(const std::string& text) {
    auto r = parse_unit(text, {});
    for (auto& d : r.errors) UNSCOPED_INFO(d.str());
    REQUIRE(r.ok());
    return std::move(r.unit);
}

struct Fixture {
    SourceUnit unit;
    ShapeEnv env;
};

Fixture make_fixture(const std::string& extra = "solve x = Dirac^-1 * b ;\n") {
    SourceUnit unit = parse_ok(prelude_text() + "\n" + extra);
    auto chk = typecheck_program(unit);
    for (auto& d : chk.diags) UNSCOPED_INFO(d.str());
    REQUIRE(chk.ok());
    return Fixture{std::move(unit), std::move(chk.env)};
}

DenoteEnv make_denv(const LatticeGeom& geom, const GaugeField& gauge) {
    DenoteEnv env;
    env.geom = &geom;
    env.gauge = &gauge;
    env.scalars["kappa"] = Complex{0.137, 0.0};
    env.scalars["mu"] = Complex{0.21, 0.0};
    return env;
}

double rel_diff(const Dense& a, const Dense& b) {
    double scale = std::max(a.norm2(), b.norm2());
    if (scale == 0.0) return 0.0;
    return (a - b).norm2() / scale;
}

Dense random_unit_column(long n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Complex> v(static_cast<size_t>(n));
    for (auto& c : v) c = rng.cgaussian();
    Dense b = Dense::column(std::move(v));
    double s = b.norm2();
    std::vector<Complex> w = std::move(b).take();
    for (auto& c : w) c /= s;
    return Dense::column(std::move(w));
}

bool is_zero_lit(const TermPtr& t) {
    return t->kind == TermKind::ScalarLit && t->lit == Complex{0.0, 0.0};
}

// Dense statement interpreter. Matrix-shaped subterms that depend only on
// the gauge configuration are denoted once and reused across iterations,
// so loop bodies cost a matvec instead of rebuilding dense operators.
struct DenseRun {
    const Plan& plan;
    DenoteEnv denv;
    std::vector<std::pair<std::string, Complex>> scalar_log;
    long loop_trips = 0;
    int hoisted = 0;
    std::map<TermPtr, std::string, bool (*)(const TermPtr&, const TermPtr&)> ops{term_less};

    DenseRun(const Plan& p, DenoteEnv base) : plan(p), denv(std::move(base)) {}

    static bool term_less(const TermPtr& a, const TermPtr& b) { return term_cmp(a, b) < 0; }

    static bool gauge_only(const TermPtr& t) {
        if (t->kind == TermKind::VectorSym) return false;
        if (t->kind == TermKind::SymScalar && t->name != "kappa" && t->name != "mu") return false;
        for (const auto& k : t->kids)
            if (!gauge_only(k)) return false;
        return true;
    }

    TermPtr hoist(const TermPtr& t) {
        auto sh = infer_shape(t, plan.env);
        if (sh && sh->is_matrix() && gauge_only(t)) {
            auto it = ops.find(t);
            if (it == ops.end()) {
                std::string name = "__op" + std::to_string(++hoisted);
                denv.bind[name] = denote(t, denv);
                it = ops.emplace(t, std::move(name)).first;
            }
            return t_mat(it->second);
        }
        return map_kids(t, [&](const TermPtr& k) { return hoist(k); });
    }

    void run() {
        for (const auto& s : plan.stmts) exec(s);
    }

    void exec(const StmtPtr& s) {
        switch (s->kind) {
        case StmtKind::Assign: {
            const std::string& nm = s->lhs->name;
            REQUIRE(s->lhs->kind != TermKind::MatrixSym);
            if (s->lhs->kind == TermKind::VectorSym && is_zero_lit(s->rhs)) {
                const Shape* sh = plan.env.find(nm);
                REQUIRE(sh);
                denv.bind[nm] = Dense(long(sh->rows->cardinality()), 1);
                return;
            }
            Dense v = denote(hoist(s->rhs), denv);
            if (s->lhs->kind == TermKind::VectorSym) {
                denv.bind[nm] = std::move(v);
            } else {
                REQUIRE(v.is_scalar());
                denv.scalars[nm] = v(0, 0);
                scalar_log.emplace_back(nm, v(0, 0));
            }
            return;
        }
        case StmtKind::While: {
            long guard = 0;
            while (true) {
                Dense l = denote(hoist(s->cond_l), denv);
                Dense r = denote(hoist(s->cond_r), denv);
                bool go = s->cmp == '>' ? l(0, 0).real() > r(0, 0).real()
                                        : l(0, 0).real() < r(0, 0).real();
                if (!go) break;
                REQUIRE(++guard <= 4000);
                for (const auto& c : s->body) exec(c);
            }
            loop_trips += guard;
            return;
        }
        case StmtKind::Seq:
            for (const auto& c : s->body) exec(c);
            return;
        case StmtKind::Decl:
            return;
        }
    }
};

long count_while(const std::vector<StmtPtr>& stmts) {
    long n = 0;
    for (const auto& s : stmts) {
        if (s->kind == StmtKind::While) {
            ++n;
            n += count_while(s->body);
        } else if (s->kind == StmtKind::Seq) {
            n += count_while(s->body);
        }
    }
    return n;
}

} // namespace

// ---- catalog shape ------------------------------------------------------

TEST_CASE("catalog: prelude ships the four solver templates") {
    auto fx = make_fixture();
    auto cat = load_catalog(fx.unit);
    REQUIRE(cat.all.size() == 4);
    for (const char* name : {"CGNR", "CGNE", "BiCGSTAB", "SCHUR"}) {
        const AlgorithmTemplate* t = cat.find(name);
        REQUIRE(t);
        // shared match shape: x = A^-1 * b
        REQUIRE(t->match_stmt->kind == StmtKind::Assign);
        const TermPtr& rhs = t->match_stmt->rhs;
        REQUIRE(rhs->kind == TermKind::Mul);
        REQUIRE(rhs->kid(0)->kind == TermKind::Inverse);
        // only the even-odd split carries a requirement
        if (t->name == "SCHUR") {
            REQUIRE(t->requires_.size() == 1);
            REQUIRE(t->requires_[0].pred == "isInvertible");
            REQUIRE(t->requires_[0].arg->kind == TermKind::Mul);
            REQUIRE(t->requires_[0].arg->arity() == 3);
            REQUIRE(t->requires_[0].arg->kid(2)->kind == TermKind::Transpose);
        } else {
            REQUIRE(t->requires_.empty());
        }
    }
    REQUIRE(cat.find("MCR1") == nullptr);

    // CGNR body: six setup statements and the loop, loop body of ten
    const AlgorithmTemplate* cgnr = cat.find("CGNR");
    REQUIRE(cgnr->body.size() == 7);
    REQUIRE(cgnr->body.back()->kind == StmtKind::While);
    REQUIRE(cgnr->body.back()->body.size() == 10);
    REQUIRE(cgnr->body[0]->kind == StmtKind::Assign); // r = b
    REQUIRE(is_zero_lit(cgnr->body[3]->rhs));         // x = 0
}

// ---- planning -----------------------------------------------------------

TEST_CASE("plan: CGNR expands the goal into one inverse-free loop") {
    auto fx = make_fixture();
    Plan p = plan_program(fx.unit, fx.env, {"CGNR"});

    REQUIRE(p.stmts.size() == 7);
    REQUIRE(count_while(p.stmts) == 1);
    const StmtPtr& loop = p.stmts.back();
    REQUIRE(loop->kind == StmtKind::While);
    REQUIRE(loop->cmp == '>');
    // the unbound epsilon input resolved to the global tolerance symbol
    REQUIRE(loop->cond_r->kind == TermKind::SymScalar);
    REQUIRE(loop->cond_r->name == "epsilon");
    REQUIRE(loop->cond_l->kind == TermKind::SymScalar);
    REQUIRE(loop->cond_l->name == "n_r__1");

    // locals got fresh names and inferred shapes
    const Shape* r = p.env.find("r__1");
    REQUIRE(r);
    REQUIRE(r->is_vector());
    REQUIRE(r->rows->cardinality() == 2 * 2 * 2 * 2 * 3 * 4);
    const Shape* nz = p.env.find("n_z__1");
    REQUIRE(nz);
    REQUIRE(nz->is_scalar());

    // the output keeps its declared name: x = 0 fill, then updates
    bool saw_x_zero = false;
    for (const auto& s : p.stmts)
        if (s->kind == StmtKind::Assign && s->lhs->name == "x" && is_zero_lit(s->rhs))
            saw_x_zero = true;
    REQUIRE(saw_x_zero);

    // normalization inlined the operator: the apply statement carries
    // structural leaves, not the Dirac symbol
    bool saw_dirac_sym = false;
    for (const auto& s : p.stmts)
        if (s->kind == StmtKind::While)
            for (const auto& c : s->body)
                for_each_node(c->rhs, [&](const TermPtr& t) {
                    if (t->kind == TermKind::MatrixSym && t->name == "Dirac") saw_dirac_sym = true;
                });
    REQUIRE(!saw_dirac_sym);
}

TEST_CASE("plan: pass and finish errors") {
    auto fx = make_fixture();

    SECTION("unknown name") {
        REQUIRE_THROWS_AS(plan_program(fx.unit, fx.env, {"GMRES"}), PlanError);
    }
    SECTION("second pass finds nothing to match") {
        REQUIRE_THROWS_AS(plan_program(fx.unit, fx.env, {"CGNR", "CGNR"}), NoMatch);
    }
    SECTION("even-odd split alone leaves the Schur complement inverse") {
        try {
            plan_program(fx.unit, fx.env, {"SCHUR"});
            FAIL("expected ResidualInverse");
        } catch (const ResidualInverse& e) {
            REQUIRE(!e.statements.empty());
            REQUIRE(std::string(e.what()).find("inverse") != std::string::npos);
        }
    }
    SECTION("requirement fails on an operator with no provable structure") {
        auto gx = make_fixture("matrix M over L (x) C (x) S , L (x) C (x) S ;\n"
                               "vector y over L (x) C (x) S ;\n"
                               "solve y = M^-1 * b ;\n");
        REQUIRE_THROWS_AS(plan_program(gx.unit, gx.env, {"SCHUR"}), RequirementUnprovable);
    }
    SECTION("missing global for an unmatched input") {
        // no dirac prelude: epsilon is not declared anywhere
        SourceUnit unit = parse_ok(slurp(repo_path("prelude/simplify.qir")) + "\n" +
                                   slurp(repo_path("prelude/algorithms.qir")) +
                                   "\nmatrix M over L (x) C (x) S , L (x) C (x) S ;\n"
                                   "vector y over L (x) C (x) S ;\n"
                                   "vector c over L (x) C (x) S ;\n"
                                   "solve y = M^-1 * c ;\n");
        auto chk = typecheck_program(unit);
        REQUIRE(chk.ok());
        REQUIRE_THROWS_AS(plan_program(unit, chk.env, {"CGNR"}), UnresolvedInput);
    }
}

// ---- dense-interpreted solves at 2x2x2x2 --------------------------------

TEST_CASE("solvers: planned programs converge on the dense operator") {
    auto fx = make_fixture();
    LatticeGeom geom({2, 2, 2, 2});
    GaugeField gauge = GaugeField::random(geom, 7);
    DenoteEnv base = make_denv(geom, gauge);

    RuleEngine eng = make_engine(fx.unit, fx.env);
    Dense dirac = denote(eng.inline_defs(t_mat("Dirac")), base);
    REQUIRE(dirac.rows() == 192);

    Dense b = random_unit_column(192, 20);
    Dense xd = dense_solve(dirac, b);

    std::map<std::string, Dense> solutions;
    for (const char* name : {"CGNR", "CGNE", "BiCGSTAB"}) {
        DYNAMIC_SECTION("solver " << name) {
            Plan p = plan_program(fx.unit, fx.env, {name});
            DenseRun run(p, base);
            run.denv.bind["b"] = b;
            // epsilon bounds <r|r>; b has unit norm, so this is a squared
            // relative tolerance
            run.denv.scalars["epsilon"] = Complex{1e-16, 0.0};
            run.run();

            REQUIRE(run.loop_trips >= 2);
            Dense x = run.denv.bind.at("x");
            double res = (dirac * x - b).norm2() / b.norm2();
            INFO(name << ": relative residual " << res << " after " << run.loop_trips
                      << " iterations");
            REQUIRE(res <= 1e-7);
            REQUIRE(rel_diff(x, xd) <= 1e-6);

            if (std::string(name) == "CGNR") {
                // <z|z> is the normal-equation residual; non-increasing per
                // CG theory, up to rounding slack
                std::vector<double> nz;
                for (const auto& [nm, v] : run.scalar_log)
                    if (nm == "n_z__1") nz.push_back(v.real());
                REQUIRE(nz.size() >= 2);
                for (size_t i = 1; i < nz.size(); ++i) REQUIRE(nz[i] <= nz[i - 1] + 1e-10);
            }
        }
    }
}

TEST_CASE("solvers: even-odd split composed with CGNR matches the direct solve") {
    auto fx = make_fixture();
    Plan split = plan_program(fx.unit, fx.env, {"SCHUR", "CGNR"});
    REQUIRE(count_while(split.stmts) == 2);
    // matrix locals were inlined away: every statement targets a vector or
    // scalar
    for (const auto& s : split.stmts)
        if (s->kind == StmtKind::Assign) REQUIRE(s->lhs->kind != TermKind::MatrixSym);

    Plan direct = plan_program(fx.unit, fx.env, {"CGNR"});

    LatticeGeom geom({2, 2, 2, 2});
    const std::uint64_t seeds[] = {3, 5, 7, 11, 13};
    for (std::uint64_t seed : seeds) {
        DYNAMIC_SECTION("gauge seed " << seed) {
            GaugeField gauge = GaugeField::random(geom, seed);
            DenoteEnv base = make_denv(geom, gauge);
            RuleEngine eng = make_engine(fx.unit, fx.env);
            Dense dirac = denote(eng.inline_defs(t_mat("Dirac")), base);
            Dense b = random_unit_column(192, 100 + seed);
            Dense xd = dense_solve(dirac, b);

            DenseRun rs(split, base);
            rs.denv.bind["b"] = b;
            rs.denv.scalars["epsilon"] = Complex{1e-18, 0.0};
            rs.run();
            Dense xs = rs.denv.bind.at("x");

            DenseRun rd(direct, base);
            rd.denv.bind["b"] = b;
            rd.denv.scalars["epsilon"] = Complex{1e-18, 0.0};
            rd.run();
            Dense xp = rd.denv.bind.at("x");

            REQUIRE(rel_diff(xs, xd) <= 1e-6);
            REQUIRE(rel_diff(xs, xp) <= 1e-6);
            REQUIRE((dirac * xs - b).norm2() / b.norm2() <= 1e-7);
        }
    }
}
