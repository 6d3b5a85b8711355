#include <catch2/catch_amalgamated.hpp>

#include "qiral/check.hpp"
#include "qiral/denote.hpp"
#include "qiral/dirac.hpp"
#include "qiral/engine.hpp"
#include "qiral/parser.hpp"
#include "qiral/printer.hpp"
#include "qiral/soundness.hpp"

#include <fstream>
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
    return slurp(repo_path("prelude/dirac.qir")) + "\n" + slurp(repo_path("prelude/simplify.qir"));
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
    RuleEngine eng;
};

Fixture make_fixture(const std::string& extra = "") {
    SourceUnit unit = parse_ok(prelude_text() + "\n" + extra);
    auto chk = typecheck_program(unit);
    for (auto& d : chk.diags) UNSCOPED_INFO(d.str());
    REQUIRE(chk.ok());
    RuleEngine eng = make_engine(unit, chk.env);
    return Fixture{std::move(unit), std::move(chk.env), std::move(eng)};
}

const IndexSetPtr& lat() {
    static IndexSetPtr s = IndexSet::lattice({2, 2, 2, 2});
    return s;
}

DenoteEnv make_denv(const LatticeGeom& geom, const GaugeField& gauge) {
    DenoteEnv env;
    env.geom = &geom;
    env.gauge = &gauge;
    env.scalars["kappa"] = Complex{0.137, 0.0};
    env.scalars["mu"] = Complex{0.21, 0.0};
    env.scalars["epsilon"] = Complex{1e-10, 0.0};
    return env;
}

double rel_diff(const Dense& a, const Dense& b) {
    double scale = std::max(a.norm2(), b.norm2());
    if (scale == 0.0) return 0.0;
    return (a - b).norm2() / scale;
}

} // namespace

// ---- scalar polynomials ----------------------------------------------

TEST_CASE("poly: expansion and structural positivity") {
    // 1 - (2 i kappa mu)^2 = 1 + 4 kappa^2 mu^2
    TermPtr beta = t_nary(TermKind::Mul, {t_lit(2.0), t_imag(), t_scalar("kappa"), t_scalar("mu")});
    TermPtr q = t_sub(t_mul(t_lit(1.0), t_lit(1.0)), t_mul(beta, beta));
    auto p = expand_scalar(q);
    REQUIRE(p);
    REQUIRE(structurally_positive(*p));
    REQUIRE(provably_nonzero(*p));

    // kappa^2 - mu^2 can vanish
    TermPtr r = t_sub(t_mul(t_scalar("kappa"), t_scalar("kappa")),
                      t_mul(t_scalar("mu"), t_scalar("mu")));
    auto pr = expand_scalar(r);
    REQUIRE(pr);
    REQUIRE(!structurally_positive(*pr));
    REQUIRE(!provably_nonzero(*pr));

    // odd powers are sign-indefinite even with positive coefficients
    TermPtr odd = t_add(t_lit(1.0), t_scalar("kappa"));
    auto po = expand_scalar(odd);
    REQUIRE(po);
    REQUIRE(!structurally_positive(*po));

    // a lone nonzero constant is nonzero
    auto pc = expand_scalar(t_lit(Complex{0.0, -3.0}));
    REQUIRE(pc);
    REQUIRE(provably_nonzero(*pc));
    REQUIRE(!provably_nonzero(*expand_scalar(t_lit(0.0))));
}

// ---- canonicalization -------------------------------------------------

TEST_CASE("canon: scalar prefixes are hoisted and folded") {
    ShapeEnv env;
    env.set("A", Shape::matrix(lat(), lat()));

    TermPtr t = t_nary(TermKind::Mul, {t_lit(2.0), t_imag(), t_scalar("kappa"), t_mat("A")});
    TermPtr c = canon(t, env);
    REQUIRE(c->kind == TermKind::ScalarMul);
    REQUIRE(c->kid(1)->kind == TermKind::MatrixSym);
    // literal coefficient folds into 2i and leads the scalar product
    REQUIRE(c->kid(0)->kind == TermKind::Mul);
    REQUIRE(c->kid(0)->kid(0)->lit == Complex{0.0, 2.0});
    REQUIRE(c->kid(0)->kid(1)->name == "kappa");

    // negation is a scalar factor
    TermPtr n = canon(t_neg(t_mat("A")), env);
    REQUIRE(n->kind == TermKind::ScalarMul);
    REQUIRE(n->kid(0)->lit == Complex{-1.0, 0.0});

    // zero coefficient with a known shape collapses to a first-class zero
    TermPtr z = canon(t_mul(t_lit(0.0), t_mat("A")), env);
    REQUIRE(z->kind == TermKind::Zero);
    REQUIRE(z->sort == PatSort::Matrix);
    REQUIRE(set_eq(z->set, lat()));

    // nested scalar multiples merge
    TermPtr m = canon(t_scalar_mul(t_lit(3.0), t_scalar_mul(t_lit(2.0), t_mat("A"))), env);
    REQUIRE(m->kind == TermKind::ScalarMul);
    REQUIRE(m->kid(0)->lit == Complex{6.0, 0.0});
}

TEST_CASE("canon: dagger folds through structure but stays on leaves") {
    ShapeEnv env;
    TermPtr u = t_link(Dir::lit(1), "s", false);
    TermPtr du = canon(t_dagger(u), env);
    REQUIRE(du->kind == TermKind::GaugeLink);
    REQUIRE(du->dag);

    // dagger of a dagger is kept for the equation to rewrite, not folded
    TermPtr dd = canon(t_dagger(t_dagger(t_mat("A"))), env);
    REQUIRE(dd->kind == TermKind::Dagger);

    // scalar dagger conjugates literals
    TermPtr sc = canon(t_dagger(t_lit(Complex{1.0, 2.0})), env);
    REQUIRE(sc->lit == Complex{1.0, -2.0});
}

// ---- matching ---------------------------------------------------------

TEST_CASE("match: commutative sums, ordered products, optional scalar") {
    ShapeEnv env;
    Matcher m(env);

    // AC: gamma5 is found anywhere in the sum, the variable takes the rest
    TermPtr pat = canon(t_add(t_pat("A", PatSort::Matrix), t_gamma5()), env);
    TermPtr sub = canon(t_nary(TermKind::Add, {t_gamma5(), t_identity(spin_set())}), env);
    auto b = m.match(pat, sub);
    REQUIRE(b);
    REQUIRE(b->terms.at("A")->kind == TermKind::Identity);

    // ordered: a product variable absorbs a contiguous segment
    TermPtr pat2 = canon(t_mul(t_pat("A", PatSort::Matrix), t_identity(spin_set())), env);
    TermPtr sub2 = canon(
        t_nary(TermKind::Mul, {t_gamma5(), t_gamma(Dir::lit(0)), t_identity(spin_set())}), env);
    auto b2 = m.match(pat2, sub2);
    REQUIRE(b2);
    REQUIRE(b2->terms.at("A")->kind == TermKind::Mul);
    REQUIRE(b2->terms.at("A")->arity() == 2);

    // a scalar prefix variable matches a bare subject as 1
    TermPtr pat3 = canon(t_scalar_mul(t_pat("s", PatSort::Scalar), t_pat("A", PatSort::Matrix)),
                         env);
    auto b3 = m.match(pat3, t_gamma5());
    REQUIRE(b3);
    REQUIRE(b3->terms.at("s")->lit == Complex{1.0, 0.0});

    // sort discipline: a matrix variable refuses a vector subject
    env.set("v", Shape::vector(spin_set()));
    auto b4 = m.match(t_pat("A", PatSort::Matrix), t_vec("v"));
    REQUIRE(!b4);
}

TEST_CASE("match: direction variables bind with their sign") {
    ShapeEnv env;
    Matcher m(env);
    TermPtr pat = t_mul(t_shift(lat(), Dir::of_var("d")), t_shift(lat(), Dir::of_var("d", true)));
    // subject already uses the negated direction first
    TermPtr sub = t_mul(t_shift(lat(), Dir::lit(0, true)), t_shift(lat(), Dir::lit(0)));
    auto b = m.match(canon(pat, env), canon(sub, env));
    REQUIRE(b);
    REQUIRE(b->dirs.at("d") == Dir::lit(0, true));
}

TEST_CASE("match: set variables take product middles") {
    ShapeEnv env;
    Matcher m(env);
    IndexSetPtr full = IndexSet::product({IndexSet::parity_half({2, 2, 2, 2}, Parity::Even),
                                          color_set(), spin_set()});
    TermPtr pat = t_identity(IndexSet::product({IndexSet::set_var("IS"), spin_set()}));
    auto b = m.match(canon(pat, env), t_identity(full));
    REQUIRE(b);
    auto bound = b->sets.at("IS");
    REQUIRE(flat_sets(bound).size() == 2);
    REQUIRE(flat_sets(bound)[1]->name == "C");
}

// ---- normalization ----------------------------------------------------

TEST_CASE("normalize: identity and tensor structure") {
    auto fx = make_fixture();

    TermPtr t1 = fx.eng.normalize(t_tensor(t_identity(lat()), t_identity(color_set())));
    REQUIRE(t1->kind == TermKind::Identity);
    REQUIRE(flat_sets(t1->set).size() == 2);

    // shift cancellation in both operand orders
    TermPtr s1 = fx.eng.normalize(t_mul(t_shift(lat(), Dir::lit(2)), t_shift(lat(), Dir::lit(2, true))));
    REQUIRE(s1->kind == TermKind::Identity);
    TermPtr s2 = fx.eng.normalize(t_mul(t_shift(lat(), Dir::lit(2, true)), t_shift(lat(), Dir::lit(2))));
    REQUIRE(s2->kind == TermKind::Identity);

    // identity absorption inside a longer chain keeps the leftovers
    TermPtr chain = t_nary(TermKind::Mul, {t_gamma5(), t_identity(spin_set()), t_gamma(Dir::lit(1))});
    TermPtr c = fx.eng.normalize(chain);
    REQUIRE(c->kind == TermKind::Mul);
    REQUIRE(c->arity() == 2);

    // gamma5 squares away entirely
    TermPtr g = fx.eng.normalize(t_mul(t_gamma5(), t_gamma5()));
    REQUIRE(g->kind == TermKind::Identity);
}

TEST_CASE("normalize: dagger pushes to the leaves") {
    auto fx = make_fixture("matrix M1 over L , L ;\nmatrix M2 over L , L ;\n");
    TermPtr t = fx.eng.normalize(t_dagger(t_mul(t_mat("M1"), t_mat("M2"))));
    REQUIRE(t->kind == TermKind::Mul);
    REQUIRE(t->kid(0)->kind == TermKind::Dagger);
    REQUIRE(t->kid(0)->kid(0)->name == "M2");
    REQUIRE(t->kid(1)->kid(0)->name == "M1");

    TermPtr sh = fx.eng.normalize(t_dagger(t_shift(lat(), Dir::lit(3))));
    REQUIRE(sh->kind == TermKind::Shift);
    REQUIRE(sh->dir == Dir::lit(3, true));
}

TEST_CASE("normalize: zeros vanish from sums and annihilate products") {
    auto fx = make_fixture("matrix M1 over L , L ;\n");
    TermPtr zero_plus = fx.eng.normalize(
        t_add(t_mul(t_lit(0.0), t_mat("M1")), t_mat("M1")));
    REQUIRE(zero_plus->kind == TermKind::MatrixSym);

    TermPtr killed = fx.eng.normalize(
        t_mul(t_mat("M1"), t_mul(t_lit(0.0), t_mat("M1"))));
    REQUIRE(killed->kind == TermKind::Zero);
}

TEST_CASE("normalize: cross-parity projector products vanish") {
    auto fx = make_fixture();
    TermPtr arg = t_mul(t_mat("P1"), t_transpose(t_mat("P2")));
    TermPtr nf = fx.eng.normalize(arg);
    REQUIRE(nf->kind == TermKind::Zero);
    REQUIRE(nf->set->cardinality() == 96);
    REQUIRE(nf->set2->cardinality() == 96);
}

TEST_CASE("normalize: idempotent and shape preserving") {
    auto fx = make_fixture();
    TermPtr p1 = t_mat("P1");
    std::vector<TermPtr> subjects = {
        t_nary(TermKind::Mul, {p1, t_mat("Dirac"), t_transpose(p1)}),
        t_nary(TermKind::Mul, {p1, t_mat("Dirac"), t_transpose(t_mat("P2"))}),
        t_mat("Dirac"),
        t_mul(p1, t_transpose(p1)),
        t_dagger(t_mat("Dirac")),
    };
    for (const auto& s : subjects) {
        TermPtr n1 = fx.eng.normalize(s);
        TermPtr n2 = fx.eng.normalize(n1);
        INFO(pretty_term(s));
        REQUIRE(term_eq(n1, n2));
        auto s0 = infer_shape(fx.eng.inline_defs(s), fx.env);
        auto s1 = infer_shape(n1, fx.env);
        REQUIRE(s0);
        REQUIRE(s1);
        REQUIRE(shape_compat(*s0, *s1));
    }
}

TEST_CASE("normalize: rewrite budget is enforced") {
    SourceUnit unit = parse_ok("matrix M1 over L , L ;\n"
                               "matrix M2 over L , L ;\n"
                               "equation swap [A : matrix, B : matrix] : A * B = B * A ;\n");
    auto chk = typecheck_program(unit);
    REQUIRE(chk.ok());
    RuleEngine eng(chk.env);
    eng.load_unit(unit);
    eng.set_fuel(64);
    REQUIRE_THROWS_AS(eng.normalize(t_mul(t_mat("M1"), t_mat("M2"))), FuelExhausted);
}

TEST_CASE("normalize: trace records rule firings") {
    auto fx = make_fixture();
    std::vector<TraceEntry> trace;
    fx.eng.set_trace(&trace);
    fx.eng.normalize(t_tensor(t_identity(lat()), t_identity(color_set())));
    fx.eng.set_trace(nullptr);
    REQUIRE(!trace.empty());
    REQUIRE(trace[0].rule == "ident_tensor");
    REQUIRE(!trace[0].before.empty());
    REQUIRE(!trace[0].after.empty());
    REQUIRE(trace[0].before != trace[0].after);
}

// ---- the even-even requirement ----------------------------------------

TEST_CASE("requirement: P1 Dirac P1^t is proven invertible") {
    auto fx = make_fixture();
    TermPtr p1 = t_mat("P1");
    TermPtr arg = t_nary(TermKind::Mul, {p1, t_mat("Dirac"), t_transpose(p1)});
    auto inv = fx.eng.check_requirement(arg);
    INFO(inv.reason);
    INFO(pretty_term(inv.normal_form));
    REQUIRE(inv.proven);

    // normal form: I + 2 i kappa mu (I (x) gamma5) on the even half-space
    const TermPtr& nf = inv.normal_form;
    REQUIRE(nf->kind == TermKind::Add);
    REQUIRE(nf->arity() == 2);
    TermPtr ident = nf->kid(0)->kind == TermKind::Identity ? nf->kid(0) : nf->kid(1);
    TermPtr twist = nf->kid(0)->kind == TermKind::Identity ? nf->kid(1) : nf->kid(0);
    REQUIRE(ident->kind == TermKind::Identity);
    REQUIRE(ident->set->cardinality() == 96);
    REQUIRE(twist->kind == TermKind::ScalarMul);
    REQUIRE(twist->kid(1)->kind == TermKind::Tensor);
    REQUIRE(twist->kid(1)->kid(1)->kind == TermKind::Gamma5);

    // the rewritten form denotes the same dense matrix as the original
    LatticeGeom geom({2, 2, 2, 2});
    GaugeField gauge = GaugeField::random(geom, 7);
    DenoteEnv denv = make_denv(geom, gauge);
    Dense before = denote(fx.eng.inline_defs(arg), denv);
    Dense after = denote(nf, denv);
    REQUIRE(before.rows() == 96);
    REQUIRE(rel_diff(before, after) < 1e-12);
}

TEST_CASE("requirement: off-diagonal parity blocks are pure hopping") {
    auto fx = make_fixture();
    TermPtr arg = t_nary(TermKind::Mul,
                         {t_mat("P1"), t_mat("Dirac"), t_transpose(t_mat("P2"))});
    TermPtr nf = fx.eng.normalize(arg);
    INFO(pretty_term(nf));
    REQUIRE(nf->kind == TermKind::Add);
    REQUIRE(nf->arity() == 2);
    for (const auto& k : nf->kids) {
        REQUIRE(k->kind == TermKind::ScalarMul);
        REQUIRE(k->kid(0)->name == "kappa");
        bool has_sum = false;
        for_each_node(k, [&](const TermPtr& x) {
            if (x->kind == TermKind::IndexedSum) has_sum = true;
        });
        REQUIRE(has_sum);
    }

    // and it is not provably invertible, with an honest reason
    auto inv = fx.eng.check_requirement(arg);
    REQUIRE(!inv.proven);
    REQUIRE(!inv.reason.empty());

    LatticeGeom geom({2, 2, 2, 2});
    GaugeField gauge = GaugeField::random(geom, 11);
    DenoteEnv denv = make_denv(geom, gauge);
    Dense before = denote(fx.eng.inline_defs(arg), denv);
    Dense after = denote(nf, denv);
    REQUIRE(rel_diff(before, after) < 1e-12);
}

TEST_CASE("requirement: odd-odd block proof and full-operator failure") {
    auto fx = make_fixture();
    TermPtr p2 = t_mat("P2");
    auto inv = fx.eng.check_requirement(
        t_nary(TermKind::Mul, {p2, t_mat("Dirac"), t_transpose(p2)}));
    INFO(inv.reason);
    REQUIRE(inv.proven);

    // the whole Dirac operator has hopping terms; the prover must decline
    auto whole = fx.eng.check_requirement(t_mat("Dirac"));
    REQUIRE(!whole.proven);
}

// ---- procedural rules against the dense oracle -------------------------

TEST_CASE("parity rule: matches the dense zero blocks it claims") {
    auto fx = make_fixture();
    LatticeGeom geom({2, 2, 2, 2});
    GaugeField gauge = GaugeField::random(geom, 3);
    DenoteEnv denv = make_denv(geom, gauge);

    // same parity, one hop: zero
    TermPtr pe = t_proj(Parity::Even, lat());
    TermPtr one_hop = t_nary(TermKind::Mul, {pe, t_shift(lat(), Dir::lit(0)), t_transpose(pe)});
    TermPtr nf = fx.eng.normalize(one_hop);
    REQUIRE(nf->kind == TermKind::Zero);
    REQUIRE(denote(fx.eng.inline_defs(one_hop), denv).norm2() == 0.0);

    // same parity, two hops: not zero, and the rule must not fire
    TermPtr two_hop = t_nary(TermKind::Mul,
                             {pe, t_shift(lat(), Dir::lit(0)), t_shift(lat(), Dir::lit(1)),
                              t_transpose(pe)});
    TermPtr nf2 = fx.eng.normalize(two_hop);
    REQUIRE(nf2->kind != TermKind::Zero);
    REQUIRE(denote(fx.eng.inline_defs(two_hop), denv).norm2() > 0.0);

    // opposite parity, one hop: not zero
    TermPtr po = t_proj(Parity::Odd, lat());
    TermPtr cross = t_nary(TermKind::Mul, {pe, t_shift(lat(), Dir::lit(2)), t_transpose(po)});
    REQUIRE(fx.eng.normalize(cross)->kind != TermKind::Zero);
}

TEST_CASE("tensor regroup: merged products denote the same matrix") {
    auto fx = make_fixture();
    LatticeGeom geom({2, 2, 2, 2});
    GaugeField gauge = GaugeField::random(geom, 5);
    DenoteEnv denv = make_denv(geom, gauge);

    // (pe (x) I_{C (x) S}) * (I_{L (x) C} (x) gamma5): neither operand pair
    // lines up factor-for-factor, so merging has to split the identities at
    // the shared boundary dimensions before grouping.
    TermPtr lhs = t_mul(t_tensor(t_proj(Parity::Even, lat()),
                                 t_identity(IndexSet::product({color_set(), spin_set()}))),
                        t_tensor(t_identity(IndexSet::product({lat(), color_set()})), t_gamma5()));
    TermPtr nf = fx.eng.normalize(lhs);
    Dense before = denote(fx.eng.inline_defs(lhs), denv);
    Dense after = denote(nf, denv);
    REQUIRE(rel_diff(before, after) < 1e-12);
    // the projector and gamma5 land in separate tensor groups and the
    // identity factors are absorbed
    REQUIRE(nf->kind == TermKind::Tensor);
    REQUIRE(nf->arity() >= 2);
    REQUIRE(nf->kid(0)->kind == TermKind::Projection);
    REQUIRE(nf->kids.back()->kind == TermKind::Gamma5);
}

// ---- every shipped equation is numerically sound ------------------------

TEST_CASE("soundness: all corpus equations hold on random instances") {
    auto fx = make_fixture();
    LatticeGeom geom({2, 2, 2, 2});
    auto reports = check_all_equations(fx.eng, geom, 2026, 5, 1e-12);
    REQUIRE(!reports.empty());
    for (const auto& rep : reports) {
        INFO(rep.rule << ": " << rep.detail << " worst " << rep.worst_rel);
        REQUIRE(rep.ok);
        REQUIRE(rep.trials == 5);
    }
}
